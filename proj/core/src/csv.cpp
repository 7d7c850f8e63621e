#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "io_util.hpp"
#include "lipfuse/error.hpp"

namespace lipfuse::detail {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open file: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw DataError("cannot write file: " + path.string());
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw DataError("write failed: " + path.string());
  }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
          fields.emplace_back(line.substr(start));
          break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
      }
      if (!rows.empty() && fields.size() != rows.front().size()) {
        throw DataError("CSV row " + std::to_string(rows.size() + 1) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(rows.front().size()));
      }
      rows.push_back(std::move(fields));
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return rows;
}

void check_csv_field(std::string_view field) {
  if (field.find_first_of(",\n\r\"") != std::string_view::npos) {
    throw DataError("value cannot be written to CSV without quoting: '" +
                    std::string(field) + "'");
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError("not a finite number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace lipfuse::detail
