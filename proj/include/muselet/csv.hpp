#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace muselet::io {

using CsvRow = std::vector<std::string>;

/// Quotes a field when it holds a comma, quote, newline or edge whitespace.
std::string csv_escape(std::string_view field);
std::string csv_line(const CsvRow& row);

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Shortest round-trip decimal form ("%.17g" trimmed); stable across runs.
std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);
/// Writes through a sibling temp file and renames over the target.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace muselet::io
