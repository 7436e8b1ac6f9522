#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cge/error.hpp"

namespace cge::csv {

inline constexpr char kDelimiter = ';';

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw Error(ErrorCode::MalformedInput, "not a number: '" + std::string(text) + "'");
  return value;
}

template <class Range>
std::string join(const Range& parts, std::string_view sep = ",") {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += sep;
    out += p;
    first = false;
  }
  return out;
}

inline std::vector<std::string> split(std::string_view line, char sep = kDelimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a semicolon table and checks it against the expected header. Rows
/// must have the header's column count unless `allow_short_rows`.
inline Table read(std::string_view text, std::string_view expected_header, bool allow_short_rows = false) {
  Table t;
  std::size_t pos = 0, line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!have_header) {
      if (line != expected_header)
        throw Error(ErrorCode::MalformedInput, "unexpected header '" + std::string(line) + "'");
      t.header = split(line);
      have_header = true;
      continue;
    }
    auto row = split(line);
    if (row.size() != t.header.size() && !(allow_short_rows && row.size() < t.header.size()))
      throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": expected " +
                                                 std::to_string(t.header.size()) + " columns");
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorCode::MalformedInput, "missing header");
  return t;
}

}  // namespace cge::csv
