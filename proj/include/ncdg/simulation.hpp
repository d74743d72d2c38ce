#pragma once

// Fixed-step RK4 driver with sampled diagnostics and divergence capture.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ncdg/dg_operator.hpp"
#include "ncdg/time_integration.hpp"

namespace ncdg {

struct RunOptions {
  /// Largest allowed step. Each interval between consecutive sample times is
  /// split into ceil(interval / dt) equal steps so samples land exactly.
  double dt = 1e-3;
  /// Increasing sample times; the run ends at the last one. A leading 0 gives
  /// an initial sample.
  std::vector<double> sample_times;
  /// Called at every sample time with the sample index.
  std::function<void(int index, double t, const Field& u)> on_sample;
  /// Called after every completed step.
  std::function<void(long step, double t, const Field& u)> on_step;
};

struct RunResult {
  bool diverged = false;
  double last_good_time = 0.0;
  long steps = 0;
  int samples = 0;
  std::string failure;
  Field final_state;
};

/// Evenly spaced sample times 0, interval, ..., count * interval.
inline std::vector<double> uniform_samples(double interval, int count) {
  std::vector<double> t(static_cast<std::size_t>(count) + 1);
  for (int k = 0; k <= count; ++k) t[k] = interval * k;
  return t;
}

template <class Model>
RunResult run_simulation(DGOperator<Model>& op, Field u, const RunOptions& opt) {
  if (!(opt.dt > 0.0)) throw Error(ErrorCode::invalid_argument, "time step must be positive");
  RunResult res;
  RK4Workspace ws;
  auto rate = [&op](const Field& x, double t, Field& dxdt) { op.rhs(x, t, dxdt); };
  double t = 0.0;
  try {
    for (std::size_t s = 0; s < opt.sample_times.size(); ++s) {
      const double target = opt.sample_times[s];
      if (target < t - 1e-12) throw Error(ErrorCode::invalid_argument, "sample times must increase");
      const double span = target - t;
      const long n = span > 0.0 ? static_cast<long>(std::ceil(span / opt.dt - 1e-9)) : 0;
      const double h = n > 0 ? span / static_cast<double>(n) : 0.0;
      const double t0 = t;
      for (long k = 1; k <= n; ++k) {
        const auto& tm = op.timings();
        const double before = tm.volume + tm.surface + tm.interface;
        const auto start = std::chrono::steady_clock::now();
        rk4_step(u, t, h, rate, ws);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        op.timings().integration += std::max(0.0, wall - (tm.volume + tm.surface + tm.interface - before));
        ++op.timings().steps;
        ++res.steps;
        t = (k == n) ? target : t0 + h * static_cast<double>(k);
        res.last_good_time = t;
        if (opt.on_step) opt.on_step(res.steps, t, u);
      }
      t = target;
      res.last_good_time = t;
      if (opt.on_sample) opt.on_sample(static_cast<int>(s), t, u);
      ++res.samples;
    }
  } catch (const Error& e) {
    if (!is_divergence(e.code())) throw;
    res.diverged = true;
    res.failure = e.what();
  }
  res.final_state = std::move(u);
  return res;
}

}  // namespace ncdg
