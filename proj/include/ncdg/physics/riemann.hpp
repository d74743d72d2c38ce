#pragma once

// Exact Riemann solver for the ideal-gas Euler equations (Toro, ch. 4):
// star pressure by safeguarded Newton iteration on the pressure function,
// then sampling of the self-similar solution along x/t = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ncdg/errors.hpp"
#include "ncdg/physics/euler.hpp"

namespace ncdg {

/// One side of a 1D Riemann problem in primitive variables.
struct RiemannSide {
  double rho = 1.0;
  double u = 0.0;
  double p = 1.0;

  double sound_speed(double gamma) const { return std::sqrt(gamma * p / rho); }
};

struct StarRegion {
  double p = 0.0;
  double u = 0.0;
  int iterations = 0;
};

/// f_K(p) and its derivative for one side.
inline void pressure_function(const RiemannSide& s, double p, double gamma, double& f, double& df) {
  const double a = s.sound_speed(gamma);
  if (p > s.p) {
    const double A = 2.0 / ((gamma + 1.0) * s.rho);
    const double B = (gamma - 1.0) / (gamma + 1.0) * s.p;
    const double q = std::sqrt(A / (p + B));
    f = (p - s.p) * q;
    df = q * (1.0 - 0.5 * (p - s.p) / (B + p));
  } else {
    const double r = p / s.p;
    const double e = std::pow(r, (gamma - 1.0) / (2.0 * gamma));
    f = 2.0 * a / (gamma - 1.0) * (e - 1.0);
    df = e / (r * s.rho * a);
  }
}

inline double star_pressure_guess(const RiemannSide& L, const RiemannSide& R, double gamma) {
  const double aL = L.sound_speed(gamma), aR = R.sound_speed(gamma);
  const double p_pv = std::max(0.0, 0.5 * (L.p + R.p) - 0.125 * (R.u - L.u) * (L.rho + R.rho) * (aL + aR));
  const double pmin = std::min(L.p, R.p), pmax = std::max(L.p, R.p);
  if (pmax / pmin <= 2.0 && p_pv >= pmin && p_pv <= pmax) return p_pv;
  if (p_pv < pmin) {
    const double z = (gamma - 1.0) / (2.0 * gamma);
    const double num = aL + aR - 0.5 * (gamma - 1.0) * (R.u - L.u);
    return std::pow(num / (aL / std::pow(L.p, z) + aR / std::pow(R.p, z)), 1.0 / z);
  }
  const double gL = std::sqrt(2.0 / ((gamma + 1.0) * L.rho) / (p_pv + (gamma - 1.0) / (gamma + 1.0) * L.p));
  const double gR = std::sqrt(2.0 / ((gamma + 1.0) * R.rho) / (p_pv + (gamma - 1.0) / (gamma + 1.0) * R.p));
  return (gL * L.p + gR * R.p - (R.u - L.u)) / (gL + gR);
}

/// Star-region pressure and velocity. Newton steps that leave the current
/// sign bracket are replaced by bisection; converged once a Newton step is
/// below 1e-12 relative, and that last step is applied.
inline StarRegion solve_star_region(const RiemannSide& L, const RiemannSide& R, double gamma = kDefaultGamma) {
  if (!(L.rho > 0.0 && R.rho > 0.0 && L.p > 0.0 && R.p > 0.0)) {
    throw Error(ErrorCode::invalid_state, "Riemann states must have positive density and pressure");
  }
  const double aL = L.sound_speed(gamma), aR = R.sound_speed(gamma);
  const double du = R.u - L.u;
  if (2.0 / (gamma - 1.0) * (aL + aR) <= du) {
    throw Error(ErrorCode::vacuum, "Riemann data generate vacuum");
  }
  auto F = [&](double p, double& f, double& df) {
    double fl, dl, fr, dr;
    pressure_function(L, p, gamma, fl, dl);
    pressure_function(R, p, gamma, fr, dr);
    f = fl + fr + du;
    df = dl + dr;
  };

  auto star_velocity = [&](double p) {
    double fl, dl, fr, dr;
    pressure_function(L, p, gamma, fl, dl);
    pressure_function(R, p, gamma, fr, dr);
    return 0.5 * (L.u + R.u) + 0.5 * (fr - fl);
  };

  double lo = 0.0, hi = std::max({L.p, R.p, 1e-300});
  double f = 0.0, df = 0.0;
  F(hi, f, df);
  for (int k = 0; f < 0.0; ++k) {
    if (k > 2000) throw Error(ErrorCode::solver_failure, "cannot bracket star pressure");
    lo = hi;
    hi *= 2.0;
    F(hi, f, df);
  }
  double p = std::clamp(star_pressure_guess(L, R, gamma), 1e-14 * hi, hi);
  for (int it = 1; it <= 100; ++it) {
    F(p, f, df);
    if (f == 0.0) return {p, star_velocity(p), it};
    const double newton = p - f / df;
    // A Newton step this small is taken as is: near the root the sign of f is
    // rounding noise, and bracketing on it would send the iterate off to a
    // bisection midpoint.
    if (2.0 * std::abs(newton - p) / (newton + p) <= 1e-12 && newton > 0.0) {
      return {newton, star_velocity(newton), it};
    }
    if (f < 0.0) lo = std::max(lo, p); else hi = std::min(hi, p);
    p = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
  }
  throw Error(ErrorCode::solver_failure, "star pressure iteration did not converge");
}

/// Primitive state on the t-axis (x/t = s) plus which side of the contact it
/// came from, for passive tangential transport.
struct SampledState {
  double rho = 0.0;
  double u = 0.0;
  double p = 0.0;
  bool from_left = true;
};

inline SampledState sample_riemann(const RiemannSide& L, const RiemannSide& R, const StarRegion& star,
                                   double gamma = kDefaultGamma, double s = 0.0) {
  const double g1 = (gamma - 1.0) / (2.0 * gamma);
  const double g2 = (gamma + 1.0) / (2.0 * gamma);
  const double g6 = (gamma - 1.0) / (gamma + 1.0);
  const double ps = star.p, us = star.u;
  if (s <= us) {
    const double a = L.sound_speed(gamma);
    const double r = ps / L.p;
    if (ps > L.p) {
      const double shock = L.u - a * std::sqrt(g2 * r + g1);
      if (s <= shock) return {L.rho, L.u, L.p, true};
      return {L.rho * (r + g6) / (g6 * r + 1.0), us, ps, true};
    }
    if (s <= L.u - a) return {L.rho, L.u, L.p, true};
    const double tail = us - a * std::pow(r, g1);
    if (s > tail) return {L.rho * std::pow(r, 1.0 / gamma), us, ps, true};
    const double c = 2.0 / (gamma + 1.0) * (a + 0.5 * (gamma - 1.0) * (L.u - s));
    return {L.rho * std::pow(c / a, 2.0 / (gamma - 1.0)), 2.0 / (gamma + 1.0) * (a + 0.5 * (gamma - 1.0) * L.u + s),
            L.p * std::pow(c / a, 2.0 * gamma / (gamma - 1.0)), true};
  }
  const double a = R.sound_speed(gamma);
  const double r = ps / R.p;
  if (ps > R.p) {
    const double shock = R.u + a * std::sqrt(g2 * r + g1);
    if (s >= shock) return {R.rho, R.u, R.p, false};
    return {R.rho * (r + g6) / (g6 * r + 1.0), us, ps, false};
  }
  if (s >= R.u + a) return {R.rho, R.u, R.p, false};
  const double tail = us + a * std::pow(r, g1);
  if (s <= tail) return {R.rho * std::pow(r, 1.0 / gamma), us, ps, false};
  const double c = 2.0 / (gamma + 1.0) * (a - 0.5 * (gamma - 1.0) * (R.u - s));
  return {R.rho * std::pow(c / a, 2.0 / (gamma - 1.0)), 2.0 / (gamma + 1.0) * (-a + 0.5 * (gamma - 1.0) * R.u + s),
          R.p * std::pow(c / a, 2.0 * gamma / (gamma - 1.0)), false};
}

/// Normal flux f~(u-, u+) . n from the exact solution of the Riemann
/// problem posed along n (u- on the left). Tangential momentum follows the
/// side of the contact that the t-axis falls on.
inline EulerState exact_riemann_flux(const double* qm, const double* qp, Vec2 n, double gamma = kDefaultGamma) {
  const Primitive wl = to_primitive(qm, gamma);
  const Primitive wr = to_primitive(qp, gamma);
  const Vec2 t{-n.y, n.x};
  const RiemannSide L{wl.rho, wl.u * n.x + wl.v * n.y, wl.p};
  const RiemannSide R{wr.rho, wr.u * n.x + wr.v * n.y, wr.p};
  const StarRegion star = solve_star_region(L, R, gamma);
  const SampledState w = sample_riemann(L, R, star, gamma, 0.0);
  const double ut = w.from_left ? (wl.u * t.x + wl.v * t.y) : (wr.u * t.x + wr.v * t.y);
  const double E = w.p / (gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + ut * ut);
  const double mass = w.rho * w.u;
  const double fn = mass * w.u + w.p;
  const double ft = mass * ut;
  return {mass, fn * n.x + ft * t.x, fn * n.y + ft * t.y, w.u * (E + w.p)};
}

inline EulerState exact_riemann_flux(const EulerState& qm, const EulerState& qp, Vec2 n,
                                     double gamma = kDefaultGamma) {
  return exact_riemann_flux(qm.data(), qp.data(), n, gamma);
}

/// Euler equations with the exact Riemann flux. The far-field state is the
/// exterior state imposed on far-field boundaries.
class EulerModel {
 public:
  static constexpr int n_vars = 4;

  explicit EulerModel(double gamma = kDefaultGamma, EulerState far_field = to_conserved({1.0, 1.0, 0.0, 1.0}))
      : gamma_(gamma), far_field_(far_field) {}

  double gamma() const { return gamma_; }
  const EulerState& far_field() const { return far_field_; }

  void flux(const double* q, Vec2, double* fx, double* fy) const {
    if (!(q[0] > 0.0)) throw Error(ErrorCode::invalid_state, "non-positive density in volume flux");
    const double u = q[1] / q[0], v = q[2] / q[0];
    const double p = (gamma_ - 1.0) * (q[3] - 0.5 * (q[1] * u + q[2] * v));
    if (!(p > 0.0)) throw Error(ErrorCode::invalid_state, "non-positive pressure in volume flux");
    const double H = q[3] + p;
    fx[0] = q[1];
    fx[1] = q[1] * u + p;
    fx[2] = q[2] * u;
    fx[3] = u * H;
    fy[0] = q[2];
    fy[1] = q[1] * v;
    fy[2] = q[2] * v + p;
    fy[3] = v * H;
  }

  void numerical_flux(const double* qm, const double* qp, Vec2 n, Vec2, double* f) const {
    const EulerState r = exact_riemann_flux(qm, qp, n, gamma_);
    f[0] = r[0];
    f[1] = r[1];
    f[2] = r[2];
    f[3] = r[3];
  }

  void exterior_far_field(double* q) const {
    for (int k = 0; k < 4; ++k) q[k] = far_field_[k];
  }

 private:
  double gamma_;
  EulerState far_field_;
};

}  // namespace ncdg
