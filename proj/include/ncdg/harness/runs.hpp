#pragma once

// Benchmark cases: convergence study, rotating Gaussian, isentropic vortex
// and the free-stream check. Each run yields a RunRecord of CSV rows plus
// phase timings; outputs are one CSV and one JSON manifest per invocation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncdg/dg_operator.hpp"
#include "ncdg/field_ops.hpp"
#include "ncdg/harness/config.hpp"
#include "ncdg/harness/csv.hpp"
#include "ncdg/harness/rates.hpp"
#include "ncdg/models.hpp"
#include "ncdg/physics/advection.hpp"
#include "ncdg/physics/riemann.hpp"
#include "ncdg/physics/vortex.hpp"
#include "ncdg/simulation.hpp"

namespace ncdg::harness {

struct RunRecord {
  CaseConfig config;
  std::string mesh;
  int elements = 0;
  std::vector<CsvRow> rows;
  PhaseTimings timings;
  /// Wall time of the whole run, setup included.
  double wall_seconds = 0.0;
  bool diverged = false;
  double divergence_time = 0.0;
  std::string failure;

  std::string status() const { return diverged ? "diverged" : "ok"; }

  /// Values of one metric in row order.
  std::vector<double> series(const std::string& metric) const {
    std::vector<double> v;
    for (const auto& r : rows) {
      if (r.metric_name == metric) v.push_back(r.metric_value);
    }
    return v;
  }
};

namespace detail {

inline CsvRow make_row(const CaseConfig& c, const std::string& mesh, int index, double t, const std::string& metric,
                       double value) {
  return {std::string(to_string(c.kind)), std::string(to_string(c.method)), c.P, c.Q, mesh, index, t, metric, value};
}

/// 0, every, 2*every, ..., with the end time always last.
inline std::vector<double> sample_schedule(double every, double end) {
  std::vector<double> t{0.0};
  if (end <= 0.0) return t;
  const long n = static_cast<long>(std::floor(end / every + 1e-9));
  for (long k = 1; k <= n; ++k) t.push_back(std::min(end, every * static_cast<double>(k)));
  if (end - t.back() > 1e-12 * std::max(1.0, end)) t.push_back(end);
  return t;
}

/// Runs the operator from u0 over the schedule, recording sampled metrics,
/// optional per-step conservation defects, divergence and timings.
template <class Model>
void drive(RunRecord& rec, DGOperator<Model>& op, Field u0, const std::vector<double>& times,
           const std::function<void(int, double, const Field&)>& sample,
           std::chrono::steady_clock::time_point start) {
  const CaseConfig& c = rec.config;
  RunOptions opt;
  opt.dt = c.dt;
  opt.sample_times = times;
  opt.on_sample = sample;
  if (c.record_defect) {
    opt.on_step = [&](long step, double t, const Field&) {
      rec.rows.push_back(make_row(c, rec.mesh, static_cast<int>(step), t, "conservation_defect", op.max_defect()));
      op.reset_defect();
    };
  }
  const RunResult res = run_simulation(op, std::move(u0), opt);
  rec.timings = op.timings();
  rec.diverged = res.diverged;
  rec.failure = res.failure;
  if (res.diverged) {
    rec.divergence_time = res.last_good_time;
    rec.rows.push_back(make_row(c, rec.mesh, res.samples, res.last_good_time, "diverged",
                                res.last_good_time / cycle_length(c.kind)));
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline int error_quadrature(const CaseConfig& c) { return std::max(c.Q, c.P + 1) + 3; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Convergence.

/// Single advection run of the study: sin(2 pi x) cos(2 pi y) carried at
/// (1, 0) through the periodic box, L2 error every `sample_every` cycles and
/// at the end time.
inline RunRecord run_convergence_point(const CaseConfig& c) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = c;
  rec.mesh = mesh_label(c);
  const Mesh mesh = build_case_mesh(c);
  rec.elements = mesh.num_elements();
  DGOperator<AdvectionModel> op(mesh, c.P, c.Q, AdvectionModel::constant({1.0, 0.0}), c.method, c.threads);
  const double two_pi = 2.0 * std::numbers::pi;
  auto exact = [two_pi](double t) {
    return [two_pi, t](Vec2 p) { return std::sin(two_pi * (p.x - t)) * std::cos(two_pi * p.y); };
  };
  const Field u0 = project_initial(op.disc(), exact(0.0));
  const double end = duration(c);
  detail::drive(
      rec, op, u0, detail::sample_schedule(c.sample_every * cycle_length(c.kind), end),
      [&](int index, double t, const Field& u) {
        if (index == 0) return;
        rec.rows.push_back(detail::make_row(c, rec.mesh, index, t, "l2_error",
                                            l2_error(op.disc(), u, exact(t), detail::error_quadrature(c))));
      },
      start);
  return rec;
}

struct SeriesFit {
  StudySeries series;
  int P = 0;
  int Q = 0;
  RateFit fit;
};

struct ConvergenceResult {
  CaseConfig config;
  std::vector<RunRecord> runs;
  std::vector<SeriesFit> fits;

  /// Run rows followed by one "rate" row per series and order (mesh "fit").
  std::vector<CsvRow> rows() const {
    std::vector<CsvRow> out;
    for (const auto& r : runs) out.insert(out.end(), r.rows.begin(), r.rows.end());
    for (const auto& f : fits) {
      out.push_back({"convergence", std::string(to_string(f.series.method)), f.P, f.Q, "fit", 0, duration(config),
                     "rate", f.fit.rate});
    }
    return out;
  }

  const SeriesFit* find(InterfaceMethod m, QRule rule, int P) const {
    for (const auto& f : fits) {
      if (f.series.method == m && f.series.q_rule == rule && f.P == P) return &f;
    }
    return nullptr;
  }
};

/// Every (series, P, grid) of the study, then a rate per (series, P) from
/// the finest non-plateaued errors. h is the domain width over the grid size.
inline ConvergenceResult run_convergence(const CaseConfig& study) {
  if (study.kind != CaseKind::convergence) throw Error(ErrorCode::invalid_argument, "not a convergence config");
  validate(study);
  ConvergenceResult res;
  res.config = study;
  const double width = case_domain(study.kind).width();
  for (const auto& s : study.series) {
    for (int P : study.orders) {
      std::vector<ErrorPoint> pts;
      int Q = 0;
      for (int n : study.grids) {
        const CaseConfig c = series_config(study, s, P, n);
        Q = c.Q;
        RunRecord rec = run_convergence_point(c);
        const auto e = rec.series("l2_error");
        pts.push_back({width / n, e.empty() ? std::numeric_limits<double>::quiet_NaN() : e.back(), rec.diverged});
        res.runs.push_back(std::move(rec));
      }
      res.fits.push_back({s, P, Q, fit_rate(pts)});
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Rotating Gaussian.

inline constexpr Vec2 kGaussianCenter{-0.625, -0.625};
inline constexpr double kGaussianSigma = 0.1;

/// Peak of the rotating Gaussian every `sample_every` cycles.
inline RunRecord run_gaussian(const CaseConfig& c) {
  if (c.kind != CaseKind::gaussian) throw Error(ErrorCode::invalid_argument, "not a gaussian config");
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = c;
  rec.mesh = mesh_label(c);
  const Mesh mesh = build_case_mesh(c);
  rec.elements = mesh.num_elements();
  DGOperator<AdvectionModel> op(mesh, c.P, c.Q, AdvectionModel::rotation(), c.method, c.threads);
  const Field u0 = project_initial(op.disc(), gaussian_field(kGaussianCenter, kGaussianSigma));
  const double cyc = cycle_length(c.kind);
  detail::drive(
      rec, op, u0, detail::sample_schedule(c.sample_every * cyc, duration(c)),
      [&](int index, double t, const Field& u) {
        rec.rows.push_back(detail::make_row(c, rec.mesh, index, t, "peak", linf_peak(op.disc(), u).value));
      },
      start);
  return rec;
}

// ---------------------------------------------------------------------------
// Isentropic vortex.

/// L2 density error against the translated exact vortex every
/// `sample_every` cycles.
inline RunRecord run_vortex(const CaseConfig& c) {
  if (c.kind != CaseKind::vortex) throw Error(ErrorCode::invalid_argument, "not a vortex config");
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = c;
  rec.mesh = mesh_label(c);
  const Mesh mesh = build_case_mesh(c);
  rec.elements = mesh.num_elements();
  DGOperator<EulerModel> op(mesh, c.P, c.Q, EulerModel(), c.method, c.threads);
  const VortexParams prm;
  const Field u0 = project_initial(op.disc(), 4, [&](Vec2 p, double* out) {
    const EulerState s = vortex_exact(prm, p.x, p.y, 0.0);
    for (int k = 0; k < 4; ++k) out[k] = s[k];
  });
  const double cyc = cycle_length(c.kind);
  detail::drive(
      rec, op, u0, detail::sample_schedule(c.sample_every * cyc, duration(c)),
      [&](int index, double t, const Field& u) {
        const double err = l2_error(
            op.disc(), u, [&](Vec2 p) { return vortex_exact(prm, p.x, p.y, t)[0]; }, detail::error_quadrature(c), 0);
        rec.rows.push_back(detail::make_row(c, rec.mesh, index, t, "l2_rho", err));
      },
      start);
  return rec;
}

// ---------------------------------------------------------------------------
// Free stream.

struct FreeStreamReport {
  bool pass = false;
  /// max |u(steps) - u(0)| over all coefficients.
  double drift = 0.0;
  /// max |du/dt| at the initial state.
  double max_rate = 0.0;
  int worst_element = -1;
  /// Half-edge whose numerical flux departs most from the consistent flux
  /// of its own interior state, and that departure.
  int worst_edge = -1;
  bool worst_edge_on_interface = false;
  double worst_edge_deviation = 0.0;
  std::string message;
  RunRecord record;
};

/// Test hooks applied to the operator before the check runs.
struct FreeStreamHooks {
  std::function<void(DGOperator<EulerModel>&)> euler;
  std::function<void(DGOperator<AdvectionModel>&)> advection;
};

namespace detail {

template <class Model>
FreeStreamReport free_stream_check(const CaseConfig& c, Model model, const std::vector<double>& state,
                                   const std::function<void(DGOperator<Model>&)>& hook) {
  const auto start = std::chrono::steady_clock::now();
  FreeStreamReport rep;
  RunRecord& rec = rep.record;
  rec.config = c;
  rec.mesh = mesh_label(c);
  const Mesh mesh = build_case_mesh(c);
  rec.elements = mesh.num_elements();
  DGOperator<Model> op(mesh, c.P, c.Q, std::move(model), c.method, c.threads);
  if (hook) hook(op);
  const int nv = Model::n_vars;
  const Field u0 = project_initial(op.disc(), nv, [&](Vec2, double* out) {
    for (int v = 0; v < nv; ++v) out[v] = state[v];
  });

  Field r;
  op.rhs(u0, 0.0, r);
  rep.max_rate = r.max_abs();
  const int npe = r.nodes_per_element();
  double worst = -1.0;
  for (int e = 0; e < r.n_elements(); ++e) {
    for (int v = 0; v < nv; ++v) {
      const double* d = r.data(e, v);
      for (int k = 0; k < npe; ++k) {
        if (std::abs(d[k]) > worst) {
          worst = std::abs(d[k]);
          rep.worst_element = e;
        }
      }
    }
  }
  std::vector<double> consistent(nv);
  const auto& tr = op.traces();
  for (int h = 0; h < mesh.num_half_edges(); ++h) {
    const auto& g = op.disc().edge_geometry(h);
    for (int q = 0; q < op.disc().nq(); ++q) {
      op.model().numerical_flux(tr.interior_at(h, q), tr.interior_at(h, q), g.normals[q], g.points[q],
                                consistent.data());
      for (int v = 0; v < nv; ++v) {
        const double dev = std::abs(tr.flux_at(h, q)[v] - consistent[v]);
        if (dev > rep.worst_edge_deviation || rep.worst_edge < 0) {
          rep.worst_edge_deviation = dev;
          rep.worst_edge = h;
        }
      }
    }
  }
  rep.worst_edge_on_interface = mesh.link(rep.worst_edge).kind == LinkKind::interface;
  // The probe rhs above is not part of the timed run; setup is.
  const double setup = op.timings().setup;
  op.timings() = PhaseTimings{};
  op.timings().setup = setup;

  const double span = c.dt * c.steps;
  std::vector<double> times{0.0, span};
  Field final_state;
  detail::drive(
      rec, op, u0, times,
      [&](int index, double, const Field& u) {
        if (index == 0) return;
        final_state = u;
      },
      start);
  if (!rec.diverged) {
    for (std::size_t k = 0; k < u0.size(); ++k) {
      rep.drift = std::max(rep.drift, std::abs(final_state.values()[k] - u0.values()[k]));
    }
  } else {
    rep.drift = std::numeric_limits<double>::infinity();
  }
  rep.pass = !rec.diverged && rep.drift <= c.drift_tolerance;
  rec.rows.push_back(make_row(c, rec.mesh, 0, 0.0, "max_rate", rep.max_rate));
  rec.rows.push_back(make_row(c, rec.mesh, 1, span, "drift", rep.drift));
  rec.rows.push_back(make_row(c, rec.mesh, 1, span, "pass", rep.pass ? 1.0 : 0.0));
  rep.message = std::string(rep.pass ? "pass" : "FAIL") + ": drift " + format_double(rep.drift) + " after " +
                std::to_string(c.steps) + " steps (tolerance " + format_double(c.drift_tolerance) +
                "); worst element " + std::to_string(rep.worst_element) + ", worst edge " +
                std::to_string(rep.worst_edge) + (rep.worst_edge_on_interface ? " (interface)" : "") +
                " flux deviation " + format_double(rep.worst_edge_deviation);
  return rep;
}

}  // namespace detail

/// Constant state for `steps` steps: Euler (rho, u, v, p) = (1, 1, 0, 1)
/// with far-field y boundaries, or advection of u = 1 at (1, 0) in the
/// periodic box. Passes iff the state drifts by at most drift_tolerance.
inline FreeStreamReport run_free_stream(const CaseConfig& c, const FreeStreamHooks& hooks = {}) {
  if (c.kind != CaseKind::free_stream) throw Error(ErrorCode::invalid_argument, "not a free-stream config");
  validate(c);
  if (c.fs_model == FreeStreamModel::euler) {
    const EulerState q = to_conserved({1.0, 1.0, 0.0, 1.0});
    return detail::free_stream_check<EulerModel>(c, EulerModel(), {q.begin(), q.end()}, hooks.euler);
  }
  return detail::free_stream_check<AdvectionModel>(c, AdvectionModel::constant({1.0, 0.0}), {1.0}, hooks.advection);
}

// ---------------------------------------------------------------------------
// Outputs.

inline nlohmann::json timings_json(const PhaseTimings& t) {
  return {{"setup", t.setup},         {"volume", t.volume},
          {"surface", t.surface},     {"interface", t.interface},
          {"integration", t.integration}, {"steps", t.steps},
          {"rhs_evaluations", t.rhs_evaluations}, {"per_step", t.per_step()}};
}

inline nlohmann::json manifest_entry(const RunRecord& r) {
  return {{"config", to_json(r.config)},      {"mesh", r.mesh},
          {"elements", r.elements},           {"status", r.status()},
          {"failure", r.failure},             {"divergence_time", r.diverged ? nlohmann::json(r.divergence_time) : nlohmann::json(nullptr)},
          {"wall_seconds", r.wall_seconds},   {"timings", timings_json(r.timings)}};
}

/// Writes <dir>/<stem>.csv and <dir>/<stem>.json. The manifest echoes the
/// config and lists per-run timings and exit status.
inline void write_outputs(const std::string& dir, const std::string& stem, const CaseConfig& config,
                          const std::vector<RunRecord>& runs, const std::vector<CsvRow>& rows,
                          const nlohmann::json& extra = nlohmann::json::object()) {
  std::filesystem::create_directories(dir);
  const std::string csv = (std::filesystem::path(dir) / (stem + ".csv")).string();
  write_csv_file(csv, rows);
  nlohmann::json m;
  m["config"] = to_json(config);
  m["csv"] = csv;
  m["runs"] = nlohmann::json::array();
  bool diverged = false;
  for (const auto& r : runs) {
    m["runs"].push_back(manifest_entry(r));
    diverged = diverged || r.diverged;
  }
  m["status"] = diverged ? "diverged" : "ok";
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream f(std::filesystem::path(dir) / (stem + ".json"));
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write manifest in '" + dir + "'");
  f << m.dump(2) << '\n';
}

/// File stem such as "vortex_mortar_P5Q12_21x21-thirds@0.5".
inline std::string run_stem(const RunRecord& r) {
  return std::string(to_string(r.config.kind)) + "_" + std::string(to_string(r.config.method)) + "_P" +
         std::to_string(r.config.P) + "Q" + std::to_string(r.config.Q) + "_" + r.mesh;
}

}  // namespace ncdg::harness
