#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "muselet/classify.hpp"
#include "muselet/crossval.hpp"
#include "muselet/lda.hpp"
#include "muselet/represent.hpp"
#include "muselet/selection.hpp"

namespace muselet::cli {

enum class LabelSource { Subdirectory, FilenamePrefix, Manifest };

struct RunConfig {
  std::optional<std::filesystem::path> input_dir;
  std::optional<std::filesystem::path> corpus_csv;
  std::optional<std::filesystem::path> model_json;
  Scheme scheme = Scheme::NoteBased;
  LabelSource label_source = LabelSource::Subdirectory;
  std::optional<std::filesystem::path> manifest;  // csv: file,label (file relative to input_dir)
  LdaConfig lda;
  std::optional<int> k;                             // fixes K instead of the extremum rule
  std::vector<int> k_grid{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  SelectionMetric metric = SelectionMetric::CaoJuan2009;
  std::vector<ClassifierKind> classifiers = all_classifiers();
  FeatureKind features = FeatureKind::TopicProportions;
  int folds = 10;
  int repeats = 3;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
};

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kNumericalFailure = 3 };

/// Each command writes its files under output_dir and throws muselet::Error on failure.
/// ingest: corpus.csv, tokens.csv, ingest_log.tsv
void cmd_ingest(const RunConfig& config, std::ostream& log);
/// topics: metrics.csv, model.json, top_tokens.csv, topics_report.txt
void cmd_topics(const RunConfig& config, std::ostream& log);
/// classify: cv_long.csv, cv_summary.csv, cv_report.json
void cmd_classify(const RunConfig& config, std::ostream& log);
/// chords: chords.csv (class,topic,weight)
void cmd_chords(const RunConfig& config, std::ostream& log);

/// Full command line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace muselet::cli
