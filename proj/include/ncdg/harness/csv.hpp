#pragma once

// Diagnostics CSV. One metric value per row, long format, so every case
// shares one schema and plot tools can group by (method, P, Q).

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ncdg/errors.hpp"

namespace ncdg::harness {

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"case", "method", "P", "Q", "mesh", "sample_index", "time",
                                             "metric_name", "metric_value"};
  return cols;
}

struct CsvRow {
  std::string case_name;
  std::string method;
  int P = 0;
  int Q = 0;
  std::string mesh;
  int sample_index = 0;
  double time = 0.0;
  std::string metric_name;
  double metric_value = 0.0;

  bool operator==(const CsvRow&) const = default;
};

/// Shortest text that reads back to the same double (%.17g).
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void check_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") != std::string::npos) {
    throw Error(ErrorCode::invalid_argument, "CSV text field contains a separator: '" + s + "'");
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, int line) {
  // from_chars handles nan/inf spellings that %.17g produces.
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

inline int parse_int(const std::string& s, int line) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline void write_csv_header(std::ostream& os) {
  const auto& cols = csv_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
}

inline void write_csv_row(std::ostream& os, const CsvRow& r) {
  detail::check_field(r.case_name);
  detail::check_field(r.method);
  detail::check_field(r.mesh);
  detail::check_field(r.metric_name);
  os << r.case_name << ',' << r.method << ',' << r.P << ',' << r.Q << ',' << r.mesh << ',' << r.sample_index << ','
     << format_double(r.time) << ',' << r.metric_name << ',' << format_double(r.metric_value) << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
}

inline void write_csv_file(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot open '" + path + "' for writing");
  write_csv(f, rows);
  if (!f) throw Error(ErrorCode::invalid_argument, "write to '" + path + "' failed");
}

/// Parses a harness CSV. The header must match the schema exactly; any
/// mismatch is reported with the offending column.
inline std::vector<CsvRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::parse, "empty CSV");
  const auto header = detail::split_csv_line(line);
  const auto& cols = csv_columns();
  if (header.size() != cols.size()) {
    throw Error(ErrorCode::parse, "expected " + std::to_string(cols.size()) + " columns, found " +
                                      std::to_string(header.size()));
  }
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (header[k] != cols[k]) {
      throw Error(ErrorCode::parse, "column " + std::to_string(k) + " is '" + header[k] + "', expected '" + cols[k] + "'");
    }
  }
  std::vector<CsvRow> rows;
  int n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != cols.size()) throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": wrong field count");
    rows.push_back({f[0], f[1], detail::parse_int(f[2], n), detail::parse_int(f[3], n), f[4], detail::parse_int(f[5], n),
                    detail::parse_double(f[6], n), f[7], detail::parse_double(f[8], n)});
  }
  return rows;
}

inline std::vector<CsvRow> read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot open '" + path + "'");
  return read_csv(f);
}

}  // namespace ncdg::harness
