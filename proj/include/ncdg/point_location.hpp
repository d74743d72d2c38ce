#pragma once

// Point location on edge traces: minimise d(t) = |x(t) - y|^2 over t in
// [-1, 1] with a secant quasi-Newton direction and Armijo backtracking.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ncdg/mesh.hpp"
#include "ncdg/spatial_index.hpp"

namespace ncdg {

struct Location {
  double xi = 0.0;
  double distance = 0.0;
  int iterations = 0;
};

struct LocateOptions {
  bool force_iterative = false;  // skip the closed form for straight edges
  int max_iterations = 50;
  double gradient_tol = 1e-12;
  double step_tol = 1e-14;
  double armijo = 1e-4;
};

namespace detail {

struct Objective {
  const EdgeTrace& trace;
  Vec2 target;

  void operator()(double t, double& d, double& g) const {
    Vec2 p, tg;
    trace.evaluate(t, p, tg);
    const Vec2 r = p - target;
    d = dot(r, r);
    g = 2.0 * dot(r, tg);
  }

  double gauss_newton_curvature(double t) const {
    Vec2 p, tg;
    trace.evaluate(t, p, tg);
    return std::max(2.0 * dot(tg, tg), std::numeric_limits<double>::min());
  }
};

inline std::optional<Location> quasi_newton(const Objective& f, double t, const LocateOptions& opt) {
  double d = 0.0, g = 0.0;
  f(t, d, g);
  double h = f.gauss_newton_curvature(t);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const bool pinned = (t <= -1.0 && g > 0.0) || (t >= 1.0 && g < 0.0);
    if (pinned || std::abs(g) <= opt.gradient_tol) return Location{t, std::sqrt(d), it};
    const double dir = -g / h;
    double alpha = 1.0;
    double t_new = t, d_new = d, g_new = g;
    for (int ls = 0; ls < 60; ++ls) {
      t_new = std::clamp(t + alpha * dir, -1.0, 1.0);
      f(t_new, d_new, g_new);
      if (d_new <= d + opt.armijo * g * (t_new - t)) break;
      alpha *= 0.5;
    }
    const double step = t_new - t;
    if (std::abs(step) <= opt.step_tol) {
      if (d_new < d) return Location{t_new, std::sqrt(d_new), it + 1};
      return Location{t, std::sqrt(d), it + 1};
    }
    const double secant = (g_new - g) / step;
    h = secant > 0.0 ? secant : f.gauss_newton_curvature(t_new);
    t = t_new;
    d = d_new;
    g = g_new;
  }
  return std::nullopt;
}

}  // namespace detail

/// Closest point of the edge trace to y. Straight edges use the clamped
/// orthogonal projection unless options force the iterative path; curved
/// edges start from the best of nine samples and fall back to eight uniform
/// seeds when the first search does not converge.
inline Location locate_point_on_edge(const EdgeTrace& edge, Vec2 y, const LocateOptions& opt = {}) {
  if (edge.straight() && !opt.force_iterative) {
    const Vec2 a = edge.point(-1.0), b = edge.point(1.0);
    const Vec2 ab = b - a;
    const double s = std::clamp(dot(y - a, ab) / dot(ab, ab), 0.0, 1.0);
    const double xi = std::clamp(2.0 * s - 1.0, -1.0, 1.0);
    return {xi, norm(edge.point(xi) - y), 0};
  }
  const detail::Objective f{edge, y};
  double best_t = -1.0, best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 9; ++k) {
    const double t = -1.0 + 0.25 * k;
    const double d = dot(edge.point(t) - y, edge.point(t) - y);
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  if (auto loc = detail::quasi_newton(f, best_t, opt)) return *loc;

  std::optional<Location> best;
  for (int k = 0; k < 8; ++k) {
    const double seed = -1.0 + 2.0 * k / 7.0;
    auto loc = detail::quasi_newton(f, seed, opt);
    if (loc && (!best || loc->distance < best->distance)) best = loc;
  }
  if (!best) throw Error(ErrorCode::location_failure, "point location did not converge from any seed");
  return *best;
}

struct OpposingPoint {
  int edge = -1;
  double xi = 0.0;
  double distance = 0.0;
};

/// Edge on the side opposite `from_side` that contains y (distance <= tol).
/// Near-ties (within 1e-12, e.g. at a shared vertex) resolve to the lowest
/// edge id.
inline OpposingPoint find_opposing_edge(const Mesh& mesh, const ZoneIndex& index, int from_side, Vec2 y,
                                        double tol = 1e-8, const LocateOptions& opt = {}) {
  const int target = 1 - from_side;
  std::vector<OpposingPoint> found;
  for (int e : index.side(target).candidates(y, tol)) {
    const Location loc = locate_point_on_edge(mesh.edge_trace(e), y, opt);
    if (loc.distance <= tol) found.push_back({e, loc.xi, loc.distance});
  }
  if (found.empty()) {
    throw Error(ErrorCode::interface_coverage,
                "no opposing edge within tolerance of (" + std::to_string(y.x) + ", " + std::to_string(y.y) + ")");
  }
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& c : found) dmin = std::min(dmin, c.distance);
  for (const auto& c : found) {  // candidates are sorted by id
    if (c.distance <= dmin + 1e-12) return c;
  }
  return found.front();
}

}  // namespace ncdg
