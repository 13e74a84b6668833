#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace soesn {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict decimal parse; throws IoError on trailing garbage.
double parse_double(std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);

/// Writes `content` to `path` (binary, LF preserved). Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace soesn
