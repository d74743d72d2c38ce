#pragma once

// Reference operators, per-element and per-edge geometric factors, elemental
// mass inverses, and the nodal Field container.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ncdg/basis.hpp"
#include "ncdg/errors.hpp"
#include "ncdg/mesh.hpp"

namespace ncdg {

/// Nodal coefficients, laid out [element][variable][j][i] with i the xi
/// index (fastest) on the (P+1)^2 tensor GLL grid.
class Field {
 public:
  Field() = default;
  Field(int n_elements, int n_vars, int order)
      : n_elements_(n_elements), n_vars_(n_vars), order_(order),
        values_(static_cast<std::size_t>(n_elements) * n_vars * (order + 1) * (order + 1), 0.0) {}

  int n_elements() const { return n_elements_; }
  int n_vars() const { return n_vars_; }
  int order() const { return order_; }
  int nodes_per_element() const { return (order_ + 1) * (order_ + 1); }
  std::size_t size() const { return values_.size(); }

  double* data(int e, int v) { return values_.data() + offset(e, v); }
  const double* data(int e, int v) const { return values_.data() + offset(e, v); }
  double& at(int e, int v, int j, int i) { return data(e, v)[j * (order_ + 1) + i]; }
  double at(int e, int v, int j, int i) const { return data(e, v)[j * (order_ + 1) + i]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool same_shape(const Field& o) const {
    return n_elements_ == o.n_elements_ && n_vars_ == o.n_vars_ && order_ == o.order_;
  }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  std::size_t offset(int e, int v) const {
    return (static_cast<std::size_t>(e) * n_vars_ + v) * static_cast<std::size_t>(nodes_per_element());
  }

  int n_elements_ = 0;
  int n_vars_ = 0;
  int order_ = 0;
  std::vector<double> values_;
};

/// y += a x
inline void axpy(Field& y, double a, const Field& x) {
  auto& yv = y.values();
  const auto& xv = x.values();
  for (std::size_t k = 0; k < yv.size(); ++k) yv[k] += a * xv[k];
}

/// Geometric data at the Q x Q volume quadrature points, index b*Q + a with
/// a along xi. The metric terms carry the weights w_a w_b:
///   m00 = w y_eta, m01 = -w x_eta, m10 = -w y_xi, m11 = w x_xi.
struct ElementGeometry {
  std::vector<double> x, y, jac, weight_jac;
  std::vector<double> m00, m01, m10, m11;
  bool constant_jacobian = false;
};

/// Geometric data at the Q trace quadrature points of one half-edge, in the
/// edge's own parameter direction.
struct EdgeGeometry {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> weight_jac;  // w_q |dx/dt|
};

class Discretization {
 public:
  Discretization(const Mesh& mesh, int order, int quad_points)
      : mesh_(&mesh), order_(order), nq_(quad_points), basis_(order) {
    if (order < 1) throw Error(ErrorCode::invalid_argument, "polynomial order must be >= 1");
    if (quad_points < order + 2) {
      throw Error(ErrorCode::insufficient_quadrature, "need Q >= P+2 quadrature points");
    }
    quad_ = gll_rule(quad_points);
    B_ = interpolation_matrix(basis_, quad_.points);
    D_ = derivative_matrix(basis_, quad_.points);
    mass1_ = segment_mass_matrix(basis_, quad_);
    mass1_inv_ = mass1_.inverse();
    build_elements();
    build_edges();
  }

  const Mesh& mesh() const { return *mesh_; }
  int order() const { return order_; }
  int n1() const { return order_ + 1; }
  int nq() const { return nq_; }
  const NodalBasis& basis() const { return basis_; }
  const QuadratureRule& quad() const { return quad_; }
  /// B(q, i) = l_i(z_q), D(q, i) = l_i'(z_q).
  const Matrix& B() const { return B_; }
  const Matrix& D() const { return D_; }
  const Matrix& mass1() const { return mass1_; }
  const Matrix& mass1_inv() const { return mass1_inv_; }

  const ElementGeometry& element_geometry(int e) const { return elements_[e]; }
  const EdgeGeometry& edge_geometry(int h) const { return edges_[h]; }

  /// Flat nodal index (j*(P+1) + i) of the k-th node along local edge `local`,
  /// following the edge's parameter direction.
  int edge_node(int local, int k) const {
    const int P = order_;
    switch (local) {
      case 0: return k;
      case 1: return k * (P + 1) + P;
      case 2: return P * (P + 1) + (P - k);
      default: return (P - k) * (P + 1);
    }
  }

  /// Dense elemental mass matrix over the (P+1)^2 nodes.
  Matrix mass_matrix(int e) const {
    const int n = n1(), Q = nq_;
    const auto& g = elements_[e];
    Matrix M = Matrix::Zero(n * n, n * n);
    for (int b = 0; b < Q; ++b) {
      for (int a = 0; a < Q; ++a) {
        const double wj = g.weight_jac[b * Q + a];
        for (int r = 0; r < n * n; ++r) {
          const double vr = B_(a, r % n) * B_(b, r / n) * wj;
          if (vr == 0.0) continue;
          for (int c = 0; c < n * n; ++c) M(r, c) += vr * B_(a, c % n) * B_(b, c / n);
        }
      }
    }
    return M;
  }

  /// r <- M_e^{-1} r for one variable block of (P+1)^2 values. `work` must
  /// hold at least (P+1)^2 values.
  void apply_mass_inverse(int e, double* r, double* work) const {
    const int n = n1();
    const auto& inv = mass_inverse_[e];
    if (!inv.matrix) {
      // (1/J) (M1^-1 (x) M1^-1) r
      const double* Mi = mass1_inv_.data();
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += Mi[i * n + k] * r[j * n + k];
          work[j * n + i] = s;
        }
      }
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += Mi[j * n + k] * work[k * n + i];
          r[j * n + i] = s * inv.inv_jac;
        }
      }
      return;
    }
    const Matrix& A = *inv.matrix;
    const int m = n * n;
    for (int p = 0; p < m; ++p) {
      double s = 0.0;
      const double* row = A.data() + static_cast<std::ptrdiff_t>(p) * m;
      for (int k = 0; k < m; ++k) s += row[k] * r[k];
      work[p] = s;
    }
    std::copy(work, work + m, r);
  }

  /// Number of distinct dense mass inverses built (0 when every element has a
  /// constant Jacobian).
  int dense_mass_inverse_count() const { return static_cast<int>(dense_cache_.size()); }

 private:
  struct MassInverse {
    double inv_jac = 1.0;
    std::shared_ptr<const Matrix> matrix;  // null on the tensor fast path
  };

  void build_elements() {
    const int Q = nq_;
    const auto& z = quad_.points;
    const auto& w = quad_.weights;
    elements_.resize(mesh_->num_elements());
    mass_inverse_.resize(mesh_->num_elements());
    for (int e = 0; e < mesh_->num_elements(); ++e) {
      auto& g = elements_[e];
      const std::size_t n = static_cast<std::size_t>(Q) * Q;
      for (auto* v : {&g.x, &g.y, &g.jac, &g.weight_jac, &g.m00, &g.m01, &g.m10, &g.m11}) v->resize(n);
      const ElementMap& map = mesh_->element_map(e);
      double jmin = std::numeric_limits<double>::infinity(), jmax = -jmin;
      for (int b = 0; b < Q; ++b) {
        for (int a = 0; a < Q; ++a) {
          Vec2 p;
          MapJacobian J;
          map.evaluate(z[a], z[b], p, J);
          const double det = J.det();
          if (!(det > 0.0)) {
            throw Error(ErrorCode::invalid_argument, "element " + std::to_string(e) + " has a non-positive Jacobian");
          }
          const std::size_t k = static_cast<std::size_t>(b) * Q + a;
          const double ww = w[a] * w[b];
          g.x[k] = p.x;
          g.y[k] = p.y;
          g.jac[k] = det;
          g.weight_jac[k] = ww * det;
          g.m00[k] = ww * J.y_eta;
          g.m01[k] = -ww * J.x_eta;
          g.m10[k] = -ww * J.y_xi;
          g.m11[k] = ww * J.x_xi;
          jmin = std::min(jmin, det);
          jmax = std::max(jmax, det);
        }
      }
      g.constant_jacobian = (jmax - jmin) <= 1e-13 * jmax;
      auto& inv = mass_inverse_[e];
      if (g.constant_jacobian) {
        inv.inv_jac = 1.0 / g.jac[0];
      } else {
        std::vector<long long> key(g.jac.size());
        for (std::size_t k = 0; k < key.size(); ++k) key[k] = std::llround(g.jac[k] * 1e12);
        auto it = dense_cache_.find(key);
        if (it == dense_cache_.end()) {
          const Matrix M = mass_matrix(e);
          Eigen::PartialPivLU<Matrix> lu(M);
          auto m = std::make_shared<const Matrix>(lu.inverse());
          if (!m->allFinite()) throw Error(ErrorCode::internal, "singular elemental mass matrix");
          it = dense_cache_.emplace(std::move(key), std::move(m)).first;
        }
        inv.matrix = it->second;
      }
    }
  }

  void build_edges() {
    const int Q = nq_;
    edges_.resize(mesh_->num_half_edges());
    for (int h = 0; h < mesh_->num_half_edges(); ++h) {
      const EdgeTrace tr = mesh_->edge_trace(h);
      auto& g = edges_[h];
      g.points.resize(Q);
      g.normals.resize(Q);
      g.weight_jac.resize(Q);
      for (int q = 0; q < Q; ++q) {
        Vec2 p, t;
        tr.evaluate(quad_.points[q], p, t);
        const double len = norm(t);
        g.points[q] = p;
        g.normals[q] = {t.y / len, -t.x / len};
        g.weight_jac[q] = quad_.weights[q] * len;
      }
    }
  }

  const Mesh* mesh_;
  int order_;
  int nq_;
  NodalBasis basis_;
  QuadratureRule quad_;
  Matrix B_, D_, mass1_, mass1_inv_;
  std::vector<ElementGeometry> elements_;
  std::vector<EdgeGeometry> edges_;
  std::vector<MassInverse> mass_inverse_;
  std::map<std::vector<long long>, std::shared_ptr<const Matrix>> dense_cache_;
};

}  // namespace ncdg
