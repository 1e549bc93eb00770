#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace muselet::zip {

/// Names of all entries in a ZIP archive held in memory, in central-directory order.
std::vector<std::string> list_entries(std::string_view archive);

/// Decompressed contents of `name`, or nullopt when the archive has no such entry.
/// Supports the stored and deflate methods. Throws Error(MalformedContainer) on a
/// corrupt archive.
std::optional<std::string> read_entry(std::string_view archive, std::string_view name);

}  // namespace muselet::zip
