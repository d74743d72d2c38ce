#pragma once

#include <cmath>
#include <functional>

#include "ncdg/geometry.hpp"

namespace ncdg {

/// Rigid counter-clockwise rotation about the origin, period 2*pi.
inline Vec2 rotation_velocity(double x, double y) { return {-y, x}; }

/// (v.n) u^- for outflow, (v.n) u^+ for inflow.
inline double upwind_flux(double u_minus, double u_plus, Vec2 n, Vec2 v) {
  const double vn = dot(v, n);
  return vn >= 0.0 ? vn * u_minus : vn * u_plus;
}

/// Scalar transport F(u) = v(x) u with either a constant velocity or the
/// rotation field.
class AdvectionModel {
 public:
  static constexpr int n_vars = 1;

  static AdvectionModel constant(Vec2 v) { return AdvectionModel(false, v); }
  static AdvectionModel rotation() { return AdvectionModel(true, {}); }

  bool rotating() const { return rotating_; }

  Vec2 velocity(Vec2 x) const { return rotating_ ? rotation_velocity(x.x, x.y) : velocity_; }

  void flux(const double* u, Vec2 x, double* fx, double* fy) const {
    const Vec2 v = velocity(x);
    fx[0] = v.x * u[0];
    fy[0] = v.y * u[0];
  }

  void numerical_flux(const double* um, const double* up, Vec2 n, Vec2 x, double* f) const {
    f[0] = upwind_flux(um[0], up[0], n, velocity(x));
  }

 private:
  AdvectionModel(bool rotating, Vec2 v) : rotating_(rotating), velocity_(v) {}

  bool rotating_;
  Vec2 velocity_;
};

/// exp(-|x - x0|^2 / sigma^2).
inline std::function<double(Vec2)> gaussian_field(Vec2 center, double sigma) {
  return [center, sigma](Vec2 p) {
    const Vec2 d = p - center;
    return std::exp(-dot(d, d) / (sigma * sigma));
  };
}

}  // namespace ncdg
