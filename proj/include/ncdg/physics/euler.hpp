#pragma once

// Two-dimensional compressible Euler equations in conserved variables
// (rho, rho u, rho v, E) with the ideal-gas closure
// p = (gamma - 1) (E - rho |v|^2 / 2).

#include <array>
#include <cmath>
#include <string>

#include "ncdg/errors.hpp"
#include "ncdg/geometry.hpp"

namespace ncdg {

inline constexpr double kDefaultGamma = 1.4;

using EulerState = std::array<double, 4>;

struct Primitive {
  double rho = 1.0;
  double u = 0.0;
  double v = 0.0;
  double p = 1.0;
};

inline EulerState to_conserved(const Primitive& w, double gamma = kDefaultGamma) {
  return {w.rho, w.rho * w.u, w.rho * w.v, w.p / (gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v)};
}

inline double pressure(const double* q, double gamma = kDefaultGamma) {
  return (gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
}

inline Primitive to_primitive(const double* q, double gamma = kDefaultGamma) {
  if (!(q[0] > 0.0)) throw Error(ErrorCode::invalid_state, "non-positive density " + std::to_string(q[0]));
  const double p = pressure(q, gamma);
  if (!(p > 0.0)) throw Error(ErrorCode::invalid_state, "non-positive pressure " + std::to_string(p));
  return {q[0], q[1] / q[0], q[2] / q[0], p};
}

inline Primitive to_primitive(const EulerState& q, double gamma = kDefaultGamma) {
  return to_primitive(q.data(), gamma);
}

/// Flux tensor, [component][direction].
using EulerFlux = std::array<std::array<double, 2>, 4>;

inline EulerFlux euler_flux(const EulerState& q, double gamma = kDefaultGamma) {
  const Primitive w = to_primitive(q, gamma);
  const double H = q[3] + w.p;
  return {{{q[1], q[2]},
           {q[1] * w.u + w.p, q[1] * w.v},
           {q[2] * w.u, q[2] * w.v + w.p},
           {w.u * H, w.v * H}}};
}

}  // namespace ncdg
