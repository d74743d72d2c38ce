#pragma once

#include <string>
#include <utility>

#include "ncdg/discretization.hpp"
#include "ncdg/errors.hpp"

namespace ncdg {

/// Stage storage reused across steps.
struct RK4Workspace {
  Field stage, rate, acc;
};

namespace detail {

inline void require_finite(const Field& f, double t) {
  if (!f.all_finite()) {
    throw Error(ErrorCode::diverged_state, "non-finite state at t = " + std::to_string(t));
  }
}

}  // namespace detail

/// Classical four-stage Runge-Kutta step, u <- u + dt/6 (k1 + 2 k2 + 2 k3 + k4).
/// `rate(const Field& u, double t, Field& dudt)` must fill dudt. Every stage
/// state is checked for NaN/Inf.
template <class Rate>
void rk4_step(Field& u, double t, double dt, Rate&& rate, RK4Workspace& ws) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "time step must be positive");
  if (!ws.stage.same_shape(u)) {
    ws.stage = u;
    ws.rate = u;
    ws.acc = u;
  }
  auto& un = u.values();
  auto& st = ws.stage.values();
  auto& k = ws.rate.values();
  auto& acc = ws.acc.values();
  const std::size_t n = un.size();

  rate(u, t, ws.rate);
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] = un[i] + dt / 6.0 * k[i];
    st[i] = un[i] + 0.5 * dt * k[i];
  }
  detail::require_finite(ws.stage, t + 0.5 * dt);

  rate(ws.stage, t + 0.5 * dt, ws.rate);
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] += dt / 3.0 * k[i];
    st[i] = un[i] + 0.5 * dt * k[i];
  }
  detail::require_finite(ws.stage, t + 0.5 * dt);

  rate(ws.stage, t + 0.5 * dt, ws.rate);
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] += dt / 3.0 * k[i];
    st[i] = un[i] + dt * k[i];
  }
  detail::require_finite(ws.stage, t + dt);

  rate(ws.stage, t + dt, ws.rate);
  for (std::size_t i = 0; i < n; ++i) un[i] = acc[i] + dt / 6.0 * k[i];
  detail::require_finite(u, t + dt);
}

template <class Rate>
void rk4_step(Field& u, double t, double dt, Rate&& rate) {
  RK4Workspace ws;
  rk4_step(u, t, dt, std::forward<Rate>(rate), ws);
}

}  // namespace ncdg
