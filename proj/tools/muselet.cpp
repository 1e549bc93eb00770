#include "muselet/cli.hpp"

int main(int argc, char** argv) { return muselet::cli::run(argc, argv); }
