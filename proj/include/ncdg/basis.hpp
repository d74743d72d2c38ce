#pragma once

// One-dimensional polynomial machinery: Gauss-Lobatto-Legendre rules, nodal
// Lagrange bases with barycentric weights, interpolation, differentiation and
// segment mass matrices.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ncdg/errors.hpp"

namespace ncdg {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

namespace detail {

// Legendre P_n and P_{n-1} at x by the three-term recurrence.
inline void legendre_pair(int n, double x, double& pn, double& pnm1) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    pn = 1.0;
    pnm1 = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pnm1 = p0;
}

}  // namespace detail

/// n-point Gauss-Lobatto-Legendre rule on [-1, 1], points ascending.
///
/// Interior nodes are the roots of P'_{n-1}; they are found by Newton
/// iteration on (1 - x^2) P'_{n-1}(x) from Chebyshev-Gauss-Lobatto guesses and
/// then symmetrised so that points[k] == -points[n-1-k] bitwise.
inline QuadratureRule gll_rule(int n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "GLL rule needs at least 2 points");
  const int N = n - 1;
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = -std::cos(std::numbers::pi * j / N);

  for (int j = 1; j < N; ++j) {
    double xj = x[j];
    for (int it = 0; it < 100; ++it) {
      double pn = 0.0, pnm1 = 0.0;
      detail::legendre_pair(N, xj, pn, pnm1);
      // Newton step for (1-x^2) P'_N, written with the recurrence identity.
      const double step = (xj * pn - pnm1) / (n * pn);
      xj -= step;
      if (std::abs(step) <= 1e-15) break;
    }
    x[j] = xj;
  }
  x[0] = -1.0;
  x[N] = 1.0;
  for (int j = 0; j < n / 2; ++j) {
    const double a = 0.5 * (x[N - j] - x[j]);
    x[j] = -a;
    x[N - j] = a;
  }
  if (n % 2 == 1) x[N / 2] = 0.0;

  QuadratureRule rule;
  rule.points = x;
  rule.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    double pn = 0.0, pnm1 = 0.0;
    detail::legendre_pair(N, x[j], pn, pnm1);
    rule.weights[j] = 2.0 / (N * (N + 1.0) * pn * pn);
  }
  for (int j = 0; j < n / 2; ++j) {
    const double w = 0.5 * (rule.weights[j] + rule.weights[N - j]);
    rule.weights[j] = w;
    rule.weights[N - j] = w;
  }
  return rule;
}

/// Lagrange basis of degree P on the (P+1)-point GLL set. P = 0 is the
/// constant basis on the single node 0.
class NodalBasis {
 public:
  explicit NodalBasis(int order) : order_(order) {
    if (order < 0) throw Error(ErrorCode::invalid_argument, "basis order must be >= 0");
    if (order == 0) {
      nodes_ = {0.0};
      bary_ = {1.0};
      diff_ = Matrix::Zero(1, 1);
      diff2_ = diff_;
      return;
    }
    nodes_ = gll_rule(order + 1).points;
    const int n = order + 1;
    bary_.assign(n, 1.0);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (k != j) bary_[j] *= (nodes_[j] - nodes_[k]);
      }
      bary_[j] = 1.0 / bary_[j];
    }
    const double scale = *std::max_element(bary_.begin(), bary_.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
    for (double& w : bary_) w /= std::abs(scale);

    diff_ = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        diff_(i, j) = (bary_[j] / bary_[i]) / (nodes_[i] - nodes_[j]);
        row += diff_(i, j);
      }
      diff_(i, i) = -row;
    }
    diff2_ = diff_ * diff_;
  }

  int order() const { return order_; }
  int size() const { return order_ + 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& bary_weights() const { return bary_; }
  /// diff_matrix()(i, j) = l_j'(x_i).
  const Matrix& diff_matrix() const { return diff_; }

  /// Values of every l_j at xi, written into out (size P+1). Nodes within
  /// 1e-14 of xi yield the exact unit vector.
  void eval_basis(double xi, std::span<double> out) const {
    const int n = size();
    for (int j = 0; j < n; ++j) {
      if (std::abs(xi - nodes_[j]) <= kNodeTolerance) {
        std::fill(out.begin(), out.begin() + n, 0.0);
        out[j] = 1.0;
        return;
      }
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      out[j] = bary_[j] / (xi - nodes_[j]);
      denom += out[j];
    }
    for (int j = 0; j < n; ++j) out[j] /= denom;
  }

  /// Basis values together with first and second derivatives at xi. The
  /// derivatives are exact re-expansions in the nodal basis (l_j' has degree
  /// P-1, l_j'' degree P-2).
  void eval_basis_derivatives(double xi, std::span<double> value, std::span<double> d1,
                              std::span<double> d2) const {
    const int n = size();
    eval_basis(xi, value);
    for (int j = 0; j < n; ++j) {
      double a = 0.0;
      for (int i = 0; i < n; ++i) a += value[i] * diff_(i, j);
      d1[j] = a;
    }
    for (int j = 0; j < n; ++j) {
      double a = 0.0;
      for (int i = 0; i < n; ++i) a += value[i] * diff2_(i, j);
      d2[j] = a;
    }
  }

  static constexpr double kNodeTolerance = 1e-14;

 private:
  int order_;
  std::vector<double> nodes_;
  std::vector<double> bary_;
  Matrix diff_;
  Matrix diff2_;
};

/// Value at xi of the degree-P interpolant through nodal_values, by the
/// second (true) barycentric formula.
inline double barycentric_eval(const NodalBasis& basis, std::span<const double> nodal_values, double xi) {
  if (!(xi >= -1.0 - 1e-10 && xi <= 1.0 + 1e-10)) {
    throw Error(ErrorCode::out_of_range, "barycentric evaluation point outside [-1, 1]");
  }
  const auto& x = basis.nodes();
  const auto& w = basis.bary_weights();
  const int n = basis.size();
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d = xi - x[j];
    if (std::abs(d) <= NodalBasis::kNodeTolerance) return nodal_values[j];
    const double c = w[j] / d;
    num += c * nodal_values[j];
    den += c;
  }
  return num / den;
}

/// Rows are the basis values at each target, so I * nodal == point values.
inline Matrix interpolation_matrix(const NodalBasis& basis, std::span<const double> targets) {
  Matrix I(static_cast<Eigen::Index>(targets.size()), basis.size());
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const double t = targets[r];
    if (!(t >= -1.0 - 1e-10 && t <= 1.0 + 1e-10)) {
      throw Error(ErrorCode::out_of_range, "interpolation target outside [-1, 1]");
    }
    basis.eval_basis(t, std::span<double>(I.row(static_cast<Eigen::Index>(r)).data(), basis.size()));
  }
  return I;
}

/// Derivatives of the basis at each target: D(r, j) = l_j'(targets[r]).
inline Matrix derivative_matrix(const NodalBasis& basis, std::span<const double> targets) {
  return interpolation_matrix(basis, targets) * basis.diff_matrix();
}

/// M(i, j) = sum_q l_i(x_q) l_j(x_q) w_q.
inline Matrix segment_mass_matrix(const NodalBasis& basis, const QuadratureRule& quad) {
  if (static_cast<int>(quad.size()) < basis.order() + 2) {
    throw Error(ErrorCode::insufficient_quadrature,
                "segment mass matrix needs at least P+2 quadrature points");
  }
  const Matrix B = interpolation_matrix(basis, quad.points);
  const Eigen::Map<const Vector> w(quad.weights.data(), static_cast<Eigen::Index>(quad.size()));
  return B.transpose() * w.asDiagonal() * B;
}

struct SegmentOperators {
  Matrix mass;
  Matrix interp_to_quad;

  SegmentOperators(const NodalBasis& basis, const QuadratureRule& quad)
      : mass(segment_mass_matrix(basis, quad)), interp_to_quad(interpolation_matrix(basis, quad.points)) {}
};

}  // namespace ncdg
