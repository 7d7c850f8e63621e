#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lipfuse::detail {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Minimal CSV: comma separated, no quoting. Blank lines are skipped and a
/// trailing '\r' is stripped. Throws DataError on ragged rows.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Throws DataError if the field cannot be written unquoted.
void check_csv_field(std::string_view field);

/// Shortest decimal string that round-trips the double.
std::string format_double(double v);

double parse_double(std::string_view s);

}  // namespace lipfuse::detail
