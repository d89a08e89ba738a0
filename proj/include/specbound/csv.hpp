#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "specbound/error.hpp"
#include "specbound/series.hpp"

namespace specbound {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  fields.push_back(field);
  for (std::string& f : fields) {
    const auto begin = f.find_first_not_of(" \t");
    const auto end = f.find_last_not_of(" \t");
    f = (begin == std::string::npos) ? "" : f.substr(begin, end - begin + 1);
  }
  return fields;
}

}  // namespace detail

// Series CSV: a header row of component names, then one row per time point;
// '.' decimal separator, no missing values. Errors name the offending line.
[[nodiscard]] inline MultivariateSeries read_series_csv(
    std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw error("cli", source + ": empty input, expected a header row");
  }
  const std::vector<std::string> names = detail::split_csv_line(line);
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j].empty()) {
      throw error("cli", source + " line 1: empty column name at column " +
                             std::to_string(j + 1));
    }
  }
  const std::size_t m = names.size();

  std::vector<double> values;
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      // A final newline is routine; blank lines elsewhere are not.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw error("cli", source + " line " + std::to_string(line_no) +
                             ": blank line inside the data");
    }
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != m) {
      throw error("cli", source + " line " + std::to_string(line_no) +
                             ": expected " + std::to_string(m) +
                             " fields, found " +
                             std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < m; ++j) {
      const std::string& f = fields[j];
      if (f.empty()) {
        throw error("cli", source + " line " + std::to_string(line_no) +
                               ": missing value in column " +
                               std::to_string(j + 1));
      }
      double v = 0.0;
      const char* first = f.data();
      const char* last = f.data() + f.size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw error("cli", source + " line " + std::to_string(line_no) +
                               ": cannot parse '" + f + "' as a number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) {
    throw error("cli", source + ": no data rows after the header");
  }
  try {
    return {rows, m, std::move(values), names};
  } catch (const error& e) {
    throw error("cli", source + ": " + e.what());
  }
}

[[nodiscard]] inline MultivariateSeries read_series_csv_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw error("cli", "cannot open input file: " + path);
  }
  return read_series_csv(in, path);
}

[[nodiscard]] inline std::string write_series_csv(
    const MultivariateSeries& series) {
  std::ostringstream out;
  for (std::size_t j = 0; j < series.m(); ++j) {
    out << (j ? "," : "") << series.names()[j];
  }
  out << "\n";
  char buf[64];
  for (std::size_t t = 0; t < series.n(); ++t) {
    for (std::size_t j = 0; j < series.m(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", series(t, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace specbound
