#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace flqr::io {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Parses one decimal field; returns false on anything that is not a finite number.
bool parse_double(std::string_view text, double& out);

/// Splits a CSV line on commas, trimming surrounding blanks from each field.
std::vector<std::string_view> split_csv(std::string_view line);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace flqr::io
