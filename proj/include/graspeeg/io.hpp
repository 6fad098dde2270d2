#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace graspeeg {

// Writes content to path via a sibling temporary file and rename, creating
// parent directories as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Shortest decimal representation that parses back to the identical double.
std::string format_double(double v);

// Strict parse: the whole token must be a finite-or-not decimal float.
// Throws DataError naming `context` on failure.
double parse_double(std::string_view token, std::string_view context);

std::vector<std::string_view> split(std::string_view line, char delim);
std::string_view trim(std::string_view s);

std::string join_doubles(std::span<const double> values, char delim = ',');

}  // namespace graspeeg
