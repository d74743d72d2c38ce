#pragma once

// Run configuration for the benchmark cases: defaults per case, validation,
// JSON round trip and the mesh each case runs on.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ncdg/errors.hpp"
#include "ncdg/interface.hpp"
#include "ncdg/mesh.hpp"

namespace ncdg::harness {

enum class CaseKind { convergence, gaussian, vortex, free_stream };
enum class QRule { fixed, p_plus_2, two_p_plus_2 };
/// cartesian: plain nx x ny grid. halves / thirds: equal columns separated
/// by interface zones, odd columns shifted.
enum class MeshLayout { automatic, cartesian, halves, thirds };
enum class FreeStreamModel { euler, advection };
enum class Profile { desk, full };

inline std::string_view to_string(CaseKind k) {
  switch (k) {
    case CaseKind::convergence: return "convergence";
    case CaseKind::gaussian: return "gaussian";
    case CaseKind::vortex: return "vortex";
    case CaseKind::free_stream: return "free-stream";
  }
  return "?";
}

inline CaseKind parse_case(std::string_view s) {
  if (s == "convergence") return CaseKind::convergence;
  if (s == "gaussian") return CaseKind::gaussian;
  if (s == "vortex") return CaseKind::vortex;
  if (s == "free-stream") return CaseKind::free_stream;
  throw Error(ErrorCode::invalid_argument, "unknown case '" + std::string(s) + "'");
}

inline std::string_view to_string(QRule r) {
  switch (r) {
    case QRule::fixed: return "fixed";
    case QRule::p_plus_2: return "p+2";
    case QRule::two_p_plus_2: return "2p+2";
  }
  return "?";
}

inline QRule parse_q_rule(std::string_view s) {
  if (s == "fixed") return QRule::fixed;
  if (s == "p+2") return QRule::p_plus_2;
  if (s == "2p+2") return QRule::two_p_plus_2;
  throw Error(ErrorCode::invalid_argument, "unknown quadrature rule '" + std::string(s) + "'");
}

inline int apply_q_rule(QRule r, int P, int fixed_q) {
  switch (r) {
    case QRule::p_plus_2: return P + 2;
    case QRule::two_p_plus_2: return 2 * P + 2;
    case QRule::fixed: return fixed_q;
  }
  return fixed_q;
}

inline std::string_view to_string(MeshLayout l) {
  switch (l) {
    case MeshLayout::automatic: return "auto";
    case MeshLayout::cartesian: return "cartesian";
    case MeshLayout::halves: return "halves";
    case MeshLayout::thirds: return "thirds";
  }
  return "?";
}

inline MeshLayout parse_layout(std::string_view s) {
  if (s == "auto") return MeshLayout::automatic;
  if (s == "cartesian") return MeshLayout::cartesian;
  if (s == "halves") return MeshLayout::halves;
  if (s == "thirds") return MeshLayout::thirds;
  throw Error(ErrorCode::invalid_argument, "unknown mesh layout '" + std::string(s) + "'");
}

inline std::string_view to_string(FreeStreamModel m) { return m == FreeStreamModel::euler ? "euler" : "advection"; }

inline FreeStreamModel parse_free_stream_model(std::string_view s) {
  if (s == "euler") return FreeStreamModel::euler;
  if (s == "advection") return FreeStreamModel::advection;
  throw Error(ErrorCode::invalid_argument, "unknown free-stream model '" + std::string(s) + "'");
}

inline Profile parse_profile(std::string_view s) {
  if (s == "desk") return Profile::desk;
  // "paper" is kept as an alias of "full".
  if (s == "full" || s == "paper") return Profile::full;
  throw Error(ErrorCode::invalid_argument, "unknown profile '" + std::string(s) + "'");
}

/// One line of a convergence study: a handler and its quadrature rule.
struct StudySeries {
  InterfaceMethod method = InterfaceMethod::conformal;
  QRule q_rule = QRule::p_plus_2;

  bool operator==(const StudySeries&) const = default;
};

/// Everything a run needs. Unset optionals and zeros mean "case default";
/// resolve() fills them in.
struct CaseConfig {
  CaseKind kind = CaseKind::vortex;
  InterfaceMethod method = InterfaceMethod::conformal;
  int P = 0;
  int Q = 0;
  QRule q_rule = QRule::fixed;
  int nx = 0;
  int ny = 0;
  std::optional<double> shift;
  MeshLayout layout = MeshLayout::automatic;
  double dt = 1e-3;
  std::optional<double> t_final;
  std::optional<double> cycles;
  /// Cycles between diagnostic samples (gaussian, vortex).
  double sample_every = 1.0;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  bool record_defect = false;

  // convergence study
  std::vector<int> grids;
  std::vector<int> orders;
  std::vector<StudySeries> series;

  // free-stream check
  FreeStreamModel fs_model = FreeStreamModel::euler;
  int steps = 100;
  double drift_tolerance = 1e-10;
};

/// Time units per cycle: one rotation for the Gaussian, one domain transit
/// at unit speed for the periodic [-5,5] cases.
inline double cycle_length(CaseKind k) { return k == CaseKind::gaussian ? 2.0 * std::numbers::pi : 10.0; }

inline Rect case_domain(CaseKind k) { return k == CaseKind::gaussian ? Rect{-2, 2, -2, 2} : Rect{-5, 5, -5, 5}; }

inline BoundarySpec case_boundaries(const CaseConfig& c) {
  switch (c.kind) {
    case CaseKind::gaussian: return BoundarySpec::all(BoundaryKind::dirichlet_zero);
    case CaseKind::vortex:
      return {BoundaryKind::periodic, BoundaryKind::periodic, BoundaryKind::far_field, BoundaryKind::far_field};
    case CaseKind::free_stream:
      if (c.fs_model == FreeStreamModel::euler) {
        return {BoundaryKind::periodic, BoundaryKind::periodic, BoundaryKind::far_field, BoundaryKind::far_field};
      }
      return BoundarySpec::all(BoundaryKind::periodic);
    case CaseKind::convergence: return BoundarySpec::all(BoundaryKind::periodic);
  }
  return {};
}

/// Fills every case default. Desk defaults keep CI runs to minutes; the
/// full profile restores the 100-cycle runs and the whole convergence family.
inline CaseConfig resolve(CaseConfig c, Profile profile = Profile::desk) {
  const bool full = profile == Profile::full;
  switch (c.kind) {
    case CaseKind::convergence:
      if (c.grids.empty()) c.grids = full ? std::vector<int>{9, 15, 21, 27, 45, 75, 150} : std::vector<int>{9, 15, 21, 27};
      if (c.orders.empty()) c.orders = full ? std::vector<int>{3, 4, 5, 6, 7, 8, 9, 10, 11} : std::vector<int>{3, 5};
      if (c.series.empty()) {
        c.series = {{InterfaceMethod::conformal, QRule::p_plus_2},
                    {InterfaceMethod::mortar, QRule::p_plus_2},
                    {InterfaceMethod::p2p, QRule::p_plus_2},
                    {InterfaceMethod::p2p, QRule::two_p_plus_2}};
      }
      if (!c.t_final && !c.cycles) c.t_final = 1.0;
      if (c.P == 0) c.P = c.orders.front();
      break;
    case CaseKind::gaussian:
      if (c.P == 0) c.P = 4;
      if (c.nx == 0) c.nx = 16;
      if (!c.t_final && !c.cycles) c.cycles = full ? 100.0 : 10.0;
      break;
    case CaseKind::vortex:
      if (c.P == 0) c.P = 5;
      if (c.Q == 0 && c.q_rule == QRule::fixed) c.q_rule = QRule::two_p_plus_2;
      if (c.nx == 0) c.nx = 21;
      if (!c.t_final && !c.cycles) c.cycles = full ? 100.0 : 2.0;
      break;
    case CaseKind::free_stream:
      if (c.P == 0) c.P = 5;
      if (c.Q == 0 && c.q_rule == QRule::fixed) c.q_rule = QRule::two_p_plus_2;
      if (c.nx == 0) c.nx = 21;
      break;
  }
  if (c.Q == 0 && c.q_rule == QRule::fixed) c.q_rule = QRule::p_plus_2;
  if (c.q_rule != QRule::fixed) c.Q = apply_q_rule(c.q_rule, c.P, c.Q);
  if (c.ny == 0) c.ny = c.nx;
  // A convergence study mixes methods; series_config() settles these per run.
  if (c.kind == CaseKind::convergence) return c;
  if (!c.shift) c.shift = c.method == InterfaceMethod::conformal ? 0.0 : 0.5;
  if (c.layout == MeshLayout::automatic) {
    if (c.method == InterfaceMethod::conformal) {
      c.layout = MeshLayout::cartesian;
    } else {
      c.layout = c.kind == CaseKind::gaussian ? MeshLayout::halves : MeshLayout::thirds;
    }
  }
  return c;
}

/// The single run of a convergence study for one series, order and grid.
/// A shift given for the study applies to the non-conformal series only.
inline CaseConfig series_config(const CaseConfig& study, const StudySeries& s, int P, int n) {
  CaseConfig c = study;
  c.method = s.method;
  c.q_rule = s.q_rule;
  c.P = P;
  c.Q = apply_q_rule(s.q_rule, P, study.Q);
  c.nx = c.ny = n;
  c.grids = {n};
  c.orders = {P};
  c.series = {s};
  if (s.method == InterfaceMethod::conformal) {
    c.shift = 0.0;
    c.layout = MeshLayout::cartesian;
  } else {
    c.shift = study.shift.value_or(0.5);
    c.layout = study.layout == MeshLayout::automatic || study.layout == MeshLayout::cartesian ? MeshLayout::thirds
                                                                                               : study.layout;
  }
  return c;
}

inline int column_count(MeshLayout l) { return l == MeshLayout::halves ? 2 : l == MeshLayout::thirds ? 3 : 1; }

/// Throws invalid-argument naming the first violated invariant. Expects a
/// resolved config.
inline void validate(const CaseConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, m); };
  if (c.P < 1) fail("P must be >= 1");
  if (c.Q < c.P + 2) fail("Q must be at least P+2 (Q=" + std::to_string(c.Q) + ", P=" + std::to_string(c.P) + ")");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) fail("dt must be positive");
  if (c.threads < 1) fail("threads must be >= 1");
  if (c.t_final && !(*c.t_final >= 0.0)) fail("t_final must be non-negative");
  if (c.cycles && !(*c.cycles >= 0.0)) fail("cycles must be non-negative");
  if (!(c.sample_every > 0.0)) fail("sample_every must be positive");
  if (c.shift && !(*c.shift >= 0.0 && *c.shift < 1.0)) fail("shift must lie in [0, 1)");
  if (c.kind != CaseKind::convergence && !c.shift) fail("config is not resolved");
  if (c.kind == CaseKind::convergence) {
    if (c.grids.empty() || c.orders.empty() || c.series.empty()) fail("convergence study needs grids, orders and series");
    for (int o : c.orders) {
      if (o < 1) fail("orders must be >= 1");
    }
    for (int g : c.grids) {
      if (g < 3 || g % 3 != 0) fail("convergence grids must be positive multiples of 3 (three equal columns)");
    }
  } else {
    if (c.nx < 1 || c.ny < 1) fail("nx and ny must be >= 1");
    if (c.nx % column_count(c.layout) != 0) fail("nx must split evenly into the layout's columns");
  }
  if (c.kind != CaseKind::convergence) {
    if (c.layout == MeshLayout::cartesian && *c.shift != 0.0) fail("a cartesian layout cannot carry a shift");
    if (c.method == InterfaceMethod::conformal && *c.shift != 0.0) fail("the conformal method needs shift = 0");
  }
  if (c.kind == CaseKind::free_stream && c.steps < 1) fail("steps must be >= 1");
}

/// Total simulated time of a resolved config.
inline double duration(const CaseConfig& c) {
  if (c.t_final) return *c.t_final;
  if (c.cycles) return *c.cycles * cycle_length(c.kind);
  return 0.0;
}

inline Mesh build_case_mesh(const CaseConfig& c, int nx, int ny) {
  const Rect domain = case_domain(c.kind);
  const BoundarySpec bc = case_boundaries(c);
  if (c.layout == MeshLayout::cartesian) return build_cartesian_mesh(domain, nx, ny, bc);
  const int n = column_count(c.layout);
  return build_shifted_interface_mesh(domain, {std::vector<int>(n, nx / n), nx}, ny, *c.shift, bc);
}

inline Mesh build_case_mesh(const CaseConfig& c) { return build_case_mesh(c, c.nx, c.ny); }

/// "21x21" for cartesian grids, "21x21-thirds@0.5" otherwise.
inline std::string mesh_label(const CaseConfig& c, int nx, int ny) {
  std::ostringstream os;
  os << nx << 'x' << ny;
  if (c.layout != MeshLayout::cartesian) os << '-' << to_string(c.layout) << '@' << *c.shift;
  return os.str();
}

inline std::string mesh_label(const CaseConfig& c) { return mesh_label(c, c.nx, c.ny); }

// JSON schema: keys mirror the CaseConfig fields. Enumerations are strings
// using the CLI spellings; optional fields may be omitted or null.
inline nlohmann::json to_json(const CaseConfig& c) {
  nlohmann::json j;
  j["case"] = to_string(c.kind);
  j["method"] = to_string(c.method);
  j["P"] = c.P;
  j["Q"] = c.Q;
  j["q_rule"] = to_string(c.q_rule);
  j["nx"] = c.nx;
  j["ny"] = c.ny;
  j["shift"] = c.shift ? nlohmann::json(*c.shift) : nlohmann::json(nullptr);
  j["layout"] = to_string(c.layout);
  j["dt"] = c.dt;
  j["t_final"] = c.t_final ? nlohmann::json(*c.t_final) : nlohmann::json(nullptr);
  j["cycles"] = c.cycles ? nlohmann::json(*c.cycles) : nlohmann::json(nullptr);
  j["sample_every"] = c.sample_every;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["record_defect"] = c.record_defect;
  j["grids"] = c.grids;
  j["orders"] = c.orders;
  nlohmann::json series = nlohmann::json::array();
  for (const auto& s : c.series) series.push_back({{"method", to_string(s.method)}, {"q_rule", to_string(s.q_rule)}});
  j["series"] = series;
  j["free_stream_model"] = to_string(c.fs_model);
  j["steps"] = c.steps;
  j["drift_tolerance"] = c.drift_tolerance;
  return j;
}

/// Reads the keys present in `j` over `base`. Unknown keys are an error so
/// typos do not silently fall back to defaults.
inline CaseConfig from_json(const nlohmann::json& j, CaseConfig c = {}) {
  if (!j.is_object()) throw Error(ErrorCode::parse, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "case") c.kind = parse_case(v.get<std::string>());
      else if (key == "method") c.method = parse_method(v.get<std::string>());
      else if (key == "P") c.P = v.get<int>();
      else if (key == "Q") c.Q = v.get<int>();
      else if (key == "q_rule") c.q_rule = parse_q_rule(v.get<std::string>());
      else if (key == "nx") c.nx = v.get<int>();
      else if (key == "ny") c.ny = v.get<int>();
      else if (key == "shift") c.shift = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (key == "layout") c.layout = parse_layout(v.get<std::string>());
      else if (key == "dt") c.dt = v.get<double>();
      else if (key == "t_final") c.t_final = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (key == "cycles") c.cycles = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (key == "sample_every") c.sample_every = v.get<double>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "record_defect") c.record_defect = v.get<bool>();
      else if (key == "grids") c.grids = v.get<std::vector<int>>();
      else if (key == "orders") c.orders = v.get<std::vector<int>>();
      else if (key == "series") {
        c.series.clear();
        for (const auto& s : v) {
          c.series.push_back({parse_method(s.at("method").get<std::string>()),
                              parse_q_rule(s.value("q_rule", std::string("p+2")))});
        }
      } else if (key == "free_stream_model") c.fs_model = parse_free_stream_model(v.get<std::string>());
      else if (key == "steps") c.steps = v.get<int>();
      else if (key == "drift_tolerance") c.drift_tolerance = v.get<double>();
      else throw Error(ErrorCode::parse, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, e.what());
  }
  return c;
}

}  // namespace ncdg::harness
