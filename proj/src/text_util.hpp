#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lftraj/error.hpp"

namespace lftraj::detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || s.empty()) {
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

inline int parse_index(const std::string& s, std::size_t line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || v < 0) {
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(line_no) + ": bad index '" + s + "'");
  }
  return v;
}

// Reads up to the first non-blank line and splits it.
template <class Stream>
std::vector<std::string> read_header(Stream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) return split_csv(line);
  }
  return {};
}

/// Two-column CSV `j,<value_name>` with dense j = 0..n.
template <class Stream>
std::vector<double> read_indexed_column(Stream& in, const std::string& value_name) {
  std::size_t line_no = 0;
  if (read_header(in, line_no) != std::vector<std::string>{"j", value_name}) {
    throw Error(ErrorCode::parse_error, "expected CSV header 'j," + value_name + "'");
  }
  std::vector<double> values;
  std::vector<bool> seen;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected 2 fields");
    }
    const auto j = static_cast<std::size_t>(parse_index(fields[0], line_no));
    if (j >= values.size()) {
      values.resize(j + 1, 0.0);
      seen.resize(j + 1, false);
    }
    if (seen[j]) throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": duplicate j");
    values[j] = parse_double(fields[1], line_no);
    seen[j] = true;
  }
  for (std::size_t j = 0; j < seen.size(); ++j) {
    if (!seen[j]) throw Error(ErrorCode::missing_entries, "missing entry j=" + std::to_string(j));
  }
  if (values.empty()) throw Error(ErrorCode::missing_entries, "no entries in input");
  return values;
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) s[k] = digits[v & 0xf];
  return s;
}

}  // namespace lftraj::detail
