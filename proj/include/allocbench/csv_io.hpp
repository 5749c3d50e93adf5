#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace allocbench {

/// Shortest "%.17g" rendering; round-trips through strtod.
std::string format_exact(double value);

/// Compact "%.10g" rendering for result tables.
std::string format_short(double value);

/// Splits one CSV line on commas; fields are trimmed, no quoting.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses a full-string double or throws std::invalid_argument.
double parse_double(std::string_view text);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace allocbench
