#pragma once

// Initial projection, L2 error and the true maximum of a nodal field.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ncdg/discretization.hpp"

namespace ncdg {

/// Pointwise initial data: writes n_vars values at a physical point.
using PointFunction = std::function<void(Vec2, double*)>;

/// Discrete L2 projection onto the degree-P space with the Q-point rule.
/// Computed as nodal interpolant plus the projection of the interpolation
/// residual; the two are equal in exact arithmetic, but the residual form
/// reproduces in-space data (constants in particular) to rounding level
/// rather than to the mass-matrix condition number.
inline Field project_initial(const Discretization& disc, int n_vars, const PointFunction& f) {
  const int n1 = disc.n1(), Q = disc.nq();
  const Matrix& B = disc.B();
  const auto& nodes = disc.basis().nodes();
  Field u(disc.mesh().num_elements(), n_vars, disc.order());
  std::vector<double> vals(static_cast<std::size_t>(Q) * Q * n_vars), nodal(static_cast<std::size_t>(n1) * n1 * n_vars);
  std::vector<double> T(static_cast<std::size_t>(n1) * Q), R(n1 * n1), work(n1 * n1);
  auto check = [](const double* v, int n) {
    for (int k = 0; k < n; ++k) {
      if (!std::isfinite(v[k])) throw Error(ErrorCode::invalid_argument, "initial data is not finite");
    }
  };
  for (int e = 0; e < u.n_elements(); ++e) {
    const auto& g = disc.element_geometry(e);
    const ElementMap& map = disc.mesh().element_map(e);
    for (int k = 0; k < Q * Q; ++k) {
      f({g.x[k], g.y[k]}, &vals[static_cast<std::size_t>(k) * n_vars]);
      check(&vals[static_cast<std::size_t>(k) * n_vars], n_vars);
    }
    for (int j = 0; j < n1; ++j) {
      for (int i = 0; i < n1; ++i) {
        double* out = &nodal[static_cast<std::size_t>(j * n1 + i) * n_vars];
        f(map.point(nodes[i], nodes[j]), out);
        check(out, n_vars);
      }
    }
    for (int v = 0; v < n_vars; ++v) {
      double* U = u.data(e, v);
      for (int k = 0; k < n1 * n1; ++k) U[k] = nodal[static_cast<std::size_t>(k) * n_vars + v];
      // T[j][a] = sum_i B[a][i] U[j][i]
      for (int j = 0; j < n1; ++j) {
        for (int a = 0; a < Q; ++a) {
          double acc = 0.0;
          for (int i = 0; i < n1; ++i) acc += B(a, i) * U[j * n1 + i];
          T[j * Q + a] = acc;
        }
      }
      std::fill(R.begin(), R.end(), 0.0);
      for (int b = 0; b < Q; ++b) {
        for (int a = 0; a < Q; ++a) {
          double interp = 0.0;
          for (int j = 0; j < n1; ++j) interp += B(b, j) * T[j * Q + a];
          const int k = b * Q + a;
          const double r = g.weight_jac[k] * (vals[static_cast<std::size_t>(k) * n_vars + v] - interp);
          for (int j = 0; j < n1; ++j) {
            const double bj = B(b, j) * r;
            for (int i = 0; i < n1; ++i) R[j * n1 + i] += B(a, i) * bj;
          }
        }
      }
      disc.apply_mass_inverse(e, R.data(), work.data());
      for (int k = 0; k < n1 * n1; ++k) {
        U[k] += R[k];
        if (!std::isfinite(U[k])) throw Error(ErrorCode::internal, "projection produced non-finite values");
      }
    }
  }
  return u;
}

inline Field project_initial(const Discretization& disc, const std::function<double(Vec2)>& f) {
  return project_initial(disc, 1, [&f](Vec2 p, double* out) { out[0] = f(p); });
}

/// sqrt(sum_e int (u_var - exact)^2) with a Q_err-point GLL rule per direction.
inline double l2_error(const Discretization& disc, const Field& u, const std::function<double(Vec2)>& exact,
                       int q_err, int var = 0) {
  if (q_err < disc.nq()) throw Error(ErrorCode::invalid_argument, "error quadrature must be at least Q");
  const QuadratureRule rule = gll_rule(q_err);
  const Matrix I = interpolation_matrix(disc.basis(), rule.points);
  const int n1 = disc.n1();
  double total = 0.0;
  std::vector<double> T(static_cast<std::size_t>(n1) * q_err);
  for (int e = 0; e < u.n_elements(); ++e) {
    const ElementMap& map = disc.mesh().element_map(e);
    const double* U = u.data(e, var);
    for (int j = 0; j < n1; ++j) {
      for (int a = 0; a < q_err; ++a) {
        double acc = 0.0;
        for (int i = 0; i < n1; ++i) acc += I(a, i) * U[j * n1 + i];
        T[j * q_err + a] = acc;
      }
    }
    double local = 0.0;
    for (int b = 0; b < q_err; ++b) {
      for (int a = 0; a < q_err; ++a) {
        double val = 0.0;
        for (int j = 0; j < n1; ++j) val += I(b, j) * T[j * q_err + a];
        Vec2 p;
        MapJacobian J;
        map.evaluate(rule.points[a], rule.points[b], p, J);
        const double d = val - exact(p);
        local += rule.weights[a] * rule.weights[b] * J.det() * d * d;
      }
    }
    total += local;
  }
  return std::sqrt(total);
}

struct Peak {
  double value = -std::numeric_limits<double>::infinity();
  Vec2 location;
  int element = -1;
};

namespace detail {

struct ElementPolynomial {
  const NodalBasis& basis;
  const double* U;
  int n1;
  mutable std::vector<double> a, da, d2a, b, db, d2b;

  ElementPolynomial(const NodalBasis& bs, const double* u)
      : basis(bs), U(u), n1(bs.size()), a(n1), da(n1), d2a(n1), b(n1), db(n1), d2b(n1) {}

  /// Value, gradient and Hessian at (xi, eta).
  void eval(double xi, double eta, double& f, std::array<double, 2>& g, std::array<double, 3>& H) const {
    basis.eval_basis_derivatives(xi, a, da, d2a);
    basis.eval_basis_derivatives(eta, b, db, d2b);
    f = 0.0;
    g = {0.0, 0.0};
    H = {0.0, 0.0, 0.0};
    for (int j = 0; j < n1; ++j) {
      double s0 = 0.0, s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < n1; ++i) {
        const double c = U[j * n1 + i];
        s0 += c * a[i];
        s1 += c * da[i];
        s2 += c * d2a[i];
      }
      f += s0 * b[j];
      g[0] += s1 * b[j];
      g[1] += s0 * db[j];
      H[0] += s2 * b[j];
      H[1] += s1 * db[j];
      H[2] += s0 * d2b[j];
    }
  }

  double value(double xi, double eta) const {
    double f;
    std::array<double, 2> g;
    std::array<double, 3> H;
    eval(xi, eta, f, g, H);
    return f;
  }
};

/// Projected Newton ascent inside [-1,1]^2; gradient steps where the Hessian
/// is not negative definite. Returns the best value found and its position.
inline double ascend(const ElementPolynomial& p, double& xi, double& eta) {
  double f;
  std::array<double, 2> g;
  std::array<double, 3> H;
  p.eval(xi, eta, f, g, H);
  for (int it = 0; it < 50; ++it) {
    // Components pushing outward at an active bound are frozen.
    std::array<double, 2> gp = g;
    if ((xi >= 1.0 && gp[0] > 0.0) || (xi <= -1.0 && gp[0] < 0.0)) gp[0] = 0.0;
    if ((eta >= 1.0 && gp[1] > 0.0) || (eta <= -1.0 && gp[1] < 0.0)) gp[1] = 0.0;
    if (std::hypot(gp[0], gp[1]) <= 1e-13) break;
    double dx, dy;
    const double det = H[0] * H[2] - H[1] * H[1];
    if (H[0] < 0.0 && det > 0.0 && gp[0] == g[0] && gp[1] == g[1]) {
      dx = -(H[2] * g[0] - H[1] * g[1]) / det;
      dy = -(-H[1] * g[0] + H[0] * g[1]) / det;
    } else {
      const double len = std::hypot(gp[0], gp[1]);
      dx = 0.5 * gp[0] / len;
      dy = 0.5 * gp[1] / len;
    }
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const double nx = std::clamp(xi + dx, -1.0, 1.0);
      const double ny = std::clamp(eta + dy, -1.0, 1.0);
      const double fn = p.value(nx, ny);
      if (fn > f) {
        const double step = std::hypot(nx - xi, ny - eta);
        xi = nx;
        eta = ny;
        p.eval(xi, eta, f, g, H);
        moved = step > 1e-15;
        break;
      }
      dx *= 0.5;
      dy *= 0.5;
    }
    if (!moved) break;
  }
  return f;
}

}  // namespace detail

/// Global maximum of variable `var`: Newton ascent from every Q x Q
/// quadrature seed of every element, never below the largest value at any
/// solution or quadrature point.
inline Peak linf_peak(const Discretization& disc, const Field& u, int var = 0) {
  const int n1 = disc.n1(), Q = disc.nq();
  const auto& z = disc.quad().points;
  const auto& nodes = disc.basis().nodes();
  Peak best;
  for (int e = 0; e < u.n_elements(); ++e) {
    const double* U = u.data(e, var);
    const ElementMap& map = disc.mesh().element_map(e);
    for (int j = 0; j < n1; ++j) {
      for (int i = 0; i < n1; ++i) {
        if (U[j * n1 + i] > best.value) best = {U[j * n1 + i], map.point(nodes[i], nodes[j]), e};
      }
    }
    detail::ElementPolynomial poly(disc.basis(), U);
    for (int b = 0; b < Q; ++b) {
      for (int a = 0; a < Q; ++a) {
        double xi = z[a], eta = z[b];
        const double v = detail::ascend(poly, xi, eta);
        if (v > best.value) best = {v, map.point(xi, eta), e};
      }
    }
  }
  return best;
}

}  // namespace ncdg
