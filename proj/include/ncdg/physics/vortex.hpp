#pragma once

#include <cmath>
#include <numbers>

#include "ncdg/errors.hpp"
#include "ncdg/physics/euler.hpp"

namespace ncdg {

/// Isentropic vortex advected at (u0, v0). The centre is wrapped periodically
/// in x over `period_x` (nearest image); period_x <= 0 disables wrapping.
struct VortexParams {
  Vec2 center{0.0, 0.0};
  double beta = 5.0;
  Vec2 velocity{1.0, 0.0};
  double gamma = kDefaultGamma;
  double period_x = 10.0;
};

/// Exact state at (x, y, t):
///   f   = 1 - r^2, r measured from the advected centre
///   rho = (1 - beta^2 (gamma-1) e^{2f} / (16 gamma pi^2))^{1/(gamma-1)}
///   u   = u0 - beta e^f (y - yc) / (2 pi)
///   v   = v0 + beta e^f (x - xc) / (2 pi)
///   p   = rho^gamma
inline EulerState vortex_exact(const VortexParams& prm, double x, double y, double t) {
  if (!(prm.beta > 0.0)) throw Error(ErrorCode::invalid_argument, "vortex strength must be positive");
  const double pi = std::numbers::pi;
  double dx = x - (prm.center.x + prm.velocity.x * t);
  const double dy = y - (prm.center.y + prm.velocity.y * t);
  if (prm.period_x > 0.0) dx -= prm.period_x * std::round(dx / prm.period_x);
  const double f = 1.0 - (dx * dx + dy * dy);
  const double g = prm.gamma;
  const double ef = std::exp(f);
  const double rho = std::pow(1.0 - prm.beta * prm.beta * (g - 1.0) * ef * ef / (16.0 * g * pi * pi), 1.0 / (g - 1.0));
  const double u = prm.velocity.x - prm.beta * ef * dy / (2.0 * pi);
  const double v = prm.velocity.y + prm.beta * ef * dx / (2.0 * pi);
  const double p = std::pow(rho, g);
  return to_conserved({rho, u, v, p}, g);
}

}  // namespace ncdg
