#pragma once

// Average cost per time step by method (rows) and P/Q pair (columns), with
// ratios against the conformal row. Setup is kept out of the averages.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ncdg/harness/runs.hpp"

namespace ncdg::harness {

struct TimingCell {
  double per_step = 0.0;
  double setup = 0.0;
  long steps = 0;
  int runs = 0;
};

struct TimingTable {
  std::vector<std::string> methods;  // row labels
  std::vector<std::string> columns;  // "P3Q5"
  std::map<std::pair<std::string, std::string>, TimingCell> cells;

  std::optional<TimingCell> cell(const std::string& method, const std::string& column) const {
    const auto it = cells.find({method, column});
    if (it == cells.end()) return std::nullopt;
    return it->second;
  }

  /// per_step(method) / per_step(reference) in one column.
  std::optional<double> ratio(const std::string& method, const std::string& column,
                              const std::string& reference = "conformal") const {
    const auto a = cell(method, column), b = cell(reference, column);
    if (!a || !b || !(b->per_step > 0.0)) return std::nullopt;
    return a->per_step / b->per_step;
  }

  /// Plain-text table: per-step seconds, then ratios to conformal, then setup.
  std::string format() const {
    std::ostringstream os;
    auto line = [&](const std::string& head, auto&& value) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%-10s", head.c_str());
      os << buf;
      for (const auto& c : columns) {
        std::snprintf(buf, sizeof buf, " %12s", value(c).c_str());
        os << buf;
      }
      os << '\n';
    };
    auto num = [](std::optional<double> x, const char* fmt) {
      if (!x) return std::string("-");
      char buf[32];
      std::snprintf(buf, sizeof buf, fmt, *x);
      return std::string(buf);
    };
    line("per-step", [](const std::string& c) { return c; });
    for (const auto& m : methods) {
      line(m, [&](const std::string& c) {
        const auto cl = cell(m, c);
        return num(cl ? std::optional<double>(cl->per_step) : std::nullopt, "%.4e");
      });
    }
    if (std::find(methods.begin(), methods.end(), "conformal") != methods.end()) {
      line("ratio", [](const std::string& c) { return c; });
      for (const auto& m : methods) line(m, [&](const std::string& c) { return num(ratio(m, c), "%.3f"); });
    }
    line("setup", [](const std::string& c) { return c; });
    for (const auto& m : methods) {
      line(m, [&](const std::string& c) {
        const auto cl = cell(m, c);
        return num(cl ? std::optional<double>(cl->setup / cl->runs) : std::nullopt, "%.4e");
      });
    }
    return os.str();
  }
};

/// Runs with the same method and P/Q pool their steps; the cell is total
/// stepping time over total steps.
inline TimingTable emit_timing_table(const std::vector<RunRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::invalid_argument, "timing table needs at least one record");
  TimingTable t;
  std::map<std::pair<std::string, std::string>, double> busy;
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const auto& r : records) {
    const std::string m(to_string(r.config.method));
    const std::string col = "P" + std::to_string(r.config.P) + "Q" + std::to_string(r.config.Q);
    add_unique(t.methods, m);
    add_unique(t.columns, col);
    TimingCell& c = t.cells[{m, col}];
    busy[{m, col}] += r.timings.per_step() * static_cast<double>(r.timings.steps);
    c.steps += r.timings.steps;
    c.setup += r.timings.setup;
    ++c.runs;
  }
  for (auto& [key, c] : t.cells) c.per_step = c.steps > 0 ? busy[key] / static_cast<double>(c.steps) : 0.0;
  std::stable_sort(t.methods.begin(), t.methods.end(), [](const std::string& a, const std::string& b) {
    auto rank = [](const std::string& s) { return s == "conformal" ? 0 : s == "mortar" ? 1 : s == "p2p" ? 2 : 3; };
    return rank(a) < rank(b);
  });
  return t;
}

}  // namespace ncdg::harness
