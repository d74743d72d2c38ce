#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "ncdg/basis.hpp"

namespace ncdg {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Jacobian of the reference-to-physical map at one point.
struct MapJacobian {
  double x_xi = 0.0, x_eta = 0.0, y_xi = 0.0, y_eta = 0.0;

  double det() const { return x_xi * y_eta - x_eta * y_xi; }
};

/// Reference square [-1,1]^2 to physical element. Order 1 is the bilinear
/// map of the four vertices; order g >= 2 interpolates (g+1)^2 control points
/// placed on the tensor GLL grid (xi index fastest).
class ElementMap {
 public:
  ElementMap() = default;

  static ElementMap bilinear(const std::array<Vec2, 4>& corners) {
    ElementMap m;
    m.order_ = 1;
    m.nodes_ = {corners[0], corners[1], corners[3], corners[2]};
    return m;
  }

  static ElementMap curved(int order, std::vector<Vec2> nodes) {
    ElementMap m;
    m.order_ = order;
    m.nodes_ = std::move(nodes);
    m.basis_ = NodalBasis(order);
    return m;
  }

  int order() const { return order_; }
  const std::vector<Vec2>& control_nodes() const { return nodes_; }

  Vec2 point(double xi, double eta) const {
    Vec2 p;
    MapJacobian j;
    evaluate(xi, eta, p, j);
    return p;
  }

  void evaluate(double xi, double eta, Vec2& p, MapJacobian& jac) const {
    if (order_ == 1) {
      // nodes_ = lexicographic (-1,-1), (1,-1), (-1,1), (1,1)
      const double a[2] = {0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
      const double b[2] = {0.5 * (1.0 - eta), 0.5 * (1.0 + eta)};
      const double da[2] = {-0.5, 0.5};
      const double db[2] = {-0.5, 0.5};
      p = {};
      jac = {};
      for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
          const Vec2 n = nodes_[2 * j + i];
          const double v = a[i] * b[j];
          p.x += v * n.x;
          p.y += v * n.y;
          jac.x_xi += da[i] * b[j] * n.x;
          jac.y_xi += da[i] * b[j] * n.y;
          jac.x_eta += a[i] * db[j] * n.x;
          jac.y_eta += a[i] * db[j] * n.y;
        }
      }
      return;
    }
    const int n = order_ + 1;
    std::vector<double> va(n), da(n), d2a(n), vb(n), db(n), d2b(n);
    basis_.eval_basis_derivatives(xi, va, da, d2a);
    basis_.eval_basis_derivatives(eta, vb, db, d2b);
    p = {};
    jac = {};
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec2 c = nodes_[j * n + i];
        const double v = va[i] * vb[j];
        p.x += v * c.x;
        p.y += v * c.y;
        jac.x_xi += da[i] * vb[j] * c.x;
        jac.y_xi += da[i] * vb[j] * c.y;
        jac.x_eta += va[i] * db[j] * c.x;
        jac.y_eta += va[i] * db[j] * c.y;
      }
    }
  }

 private:
  int order_ = 1;
  std::vector<Vec2> nodes_;
  NodalBasis basis_{0};
};

/// Reference coordinates of local edge `local` at edge parameter t. Edges run
/// counter-clockwise: 0 bottom, 1 right, 2 top, 3 left; (dxi, deta) is the
/// derivative of the reference point with respect to t.
inline void edge_reference_point(int local, double t, double& xi, double& eta, double& dxi, double& deta) {
  switch (local) {
    case 0: xi = t; eta = -1.0; dxi = 1.0; deta = 0.0; return;
    case 1: xi = 1.0; eta = t; dxi = 0.0; deta = 1.0; return;
    case 2: xi = -t; eta = 1.0; dxi = -1.0; deta = 0.0; return;
    default: xi = -1.0; eta = -t; dxi = 0.0; deta = -1.0; return;
  }
}

/// Restriction of an element map to one of its sides, x(t) for t in [-1, 1].
class EdgeTrace {
 public:
  EdgeTrace() = default;
  EdgeTrace(const ElementMap* map, int local) : map_(map), local_(local) {}

  int local_index() const { return local_; }
  bool straight() const { return map_->order() == 1; }

  Vec2 point(double t) const {
    double xi, eta, dxi, deta;
    edge_reference_point(local_, t, xi, eta, dxi, deta);
    return map_->point(xi, eta);
  }

  /// Point and tangent dx/dt.
  void evaluate(double t, Vec2& p, Vec2& tangent) const {
    double xi, eta, dxi, deta;
    edge_reference_point(local_, t, xi, eta, dxi, deta);
    MapJacobian j;
    map_->evaluate(xi, eta, p, j);
    tangent = {j.x_xi * dxi + j.x_eta * deta, j.y_xi * dxi + j.y_eta * deta};
  }

  /// Outward unit normal: the tangent rotated clockwise, since edges run
  /// counter-clockwise around the element.
  Vec2 normal(double t) const {
    Vec2 p, tg;
    evaluate(t, p, tg);
    const double len = norm(tg);
    return {tg.y / len, -tg.x / len};
  }

 private:
  const ElementMap* map_ = nullptr;
  int local_ = 0;
};

}  // namespace ncdg
