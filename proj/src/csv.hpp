#pragma once

// Minimal CSV helpers shared by the graph and signal readers/writers.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "pgvar/error.hpp"

namespace pgvar::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + " row " + std::to_string(row);
}

inline double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t row) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  require(ec == std::errc() && ptr == last, ErrorCode::format_error,
          where(path, row) + ": cannot parse '" + std::string(field) + "' as a number");
  return value;
}

inline long long parse_int(std::string_view field, const std::filesystem::path& path, std::size_t row) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  require(ec == std::errc() && ptr == field.data() + field.size(), ErrorCode::format_error,
          where(path, row) + ": cannot parse '" + std::string(field) + "' as an integer");
  return value;
}

// 17 significant digits: parsing the output recovers the exact double.
inline void append_double(std::string& out, double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  out.append(buf, ptr);
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open " + path.string());
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::io_error, "cannot write " + path.string());
  return out;
}

}  // namespace pgvar::csv
