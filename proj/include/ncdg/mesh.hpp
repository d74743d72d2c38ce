#pragma once

// Quadrilateral mesh data model: elements, half-edges (one per element side),
// conformal and periodic connectivity, boundary tags and non-conformal
// interface zones, plus the Cartesian and shifted-column generators used by
// the benchmarks.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ncdg/errors.hpp"
#include "ncdg/geometry.hpp"

namespace ncdg {

enum class BoundaryKind { periodic, dirichlet_zero, far_field };

inline std::string_view to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::periodic: return "periodic";
    case BoundaryKind::dirichlet_zero: return "dirichlet-zero";
    case BoundaryKind::far_field: return "far-field";
  }
  return "?";
}

/// How one element side connects to the rest of the discretisation.
enum class LinkKind { conformal, periodic, dirichlet_zero, far_field, interface };

struct EdgeLink {
  LinkKind kind = LinkKind::dirichlet_zero;
  int partner = -1;  // conformal / periodic partner half-edge
  int zone = -1;     // interface zone index
  int side = -1;     // 0 left, 1 right
};

struct Element {
  int id = 0;
  std::array<int, 4> vertex_ids{};  // counter-clockwise
  int geometry_order = 1;
  std::vector<Vec2> geometry_nodes;  // only for geometry_order >= 2
};

/// Half-edge id = 4 * element + local index.
inline constexpr int edge_id(int element, int local) { return 4 * element + local; }
inline constexpr int edge_element(int edge) { return edge / 4; }
inline constexpr int edge_local(int edge) { return edge % 4; }

/// Two sides of a straight non-conformal interface, each listed in increasing
/// arc coordinate along `direction` from `origin`.
struct InterfaceZone {
  std::vector<int> left_edges;
  std::vector<int> right_edges;
  Vec2 origin;
  Vec2 direction{0.0, 1.0};
  double length = 0.0;

  const std::vector<int>& side(int s) const { return s == 0 ? left_edges : right_edges; }
  double arc(Vec2 p) const { return dot(p - origin, direction); }
};

struct Rect {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Condition on each side of the rectangular domain.
struct BoundarySpec {
  BoundaryKind left = BoundaryKind::periodic;
  BoundaryKind right = BoundaryKind::periodic;
  BoundaryKind bottom = BoundaryKind::periodic;
  BoundaryKind top = BoundaryKind::periodic;

  static BoundarySpec all(BoundaryKind k) { return {k, k, k, k}; }
};

class Mesh {
 public:
  Mesh() = default;

  /// Builds element maps and derives conformal pairs from shared vertex ids.
  /// Sides without a partner, periodic pair, or zone membership must be tagged
  /// through `tag_boundary` before `finalize`.
  Mesh(std::vector<Vec2> vertices, std::vector<Element> elements)
      : vertices_(std::move(vertices)), elements_(std::move(elements)) {
    links_.assign(4 * elements_.size(), EdgeLink{});
    assigned_.assign(4 * elements_.size(), false);
    maps_.reserve(elements_.size());
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      elements_[e].id = static_cast<int>(e);
      const auto& el = elements_[e];
      for (int v : el.vertex_ids) {
        if (v < 0 || v >= static_cast<int>(vertices_.size())) {
          throw Error(ErrorCode::invalid_argument, "element references a missing vertex");
        }
      }
      if (el.geometry_order == 1) {
        maps_.push_back(ElementMap::bilinear({vertices_[el.vertex_ids[0]], vertices_[el.vertex_ids[1]],
                                              vertices_[el.vertex_ids[2]], vertices_[el.vertex_ids[3]]}));
      } else {
        const std::size_t n = static_cast<std::size_t>(el.geometry_order + 1);
        if (el.geometry_nodes.size() != n * n) {
          throw Error(ErrorCode::invalid_argument, "curved element needs (order+1)^2 geometry nodes");
        }
        maps_.push_back(ElementMap::curved(el.geometry_order, el.geometry_nodes));
      }
    }
    std::map<std::pair<int, int>, int> open;
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      for (int l = 0; l < 4; ++l) {
        const int a = elements_[e].vertex_ids[l];
        const int b = elements_[e].vertex_ids[(l + 1) % 4];
        const int h = edge_id(static_cast<int>(e), l);
        auto it = open.find({b, a});
        if (it != open.end()) {
          set_link(h, {LinkKind::conformal, it->second, -1, -1});
          set_link(it->second, {LinkKind::conformal, h, -1, -1});
          open.erase(it);
        } else {
          open[{a, b}] = h;
        }
      }
    }
  }

  void tag_boundary(int edge, LinkKind kind) {
    if (kind == LinkKind::conformal || kind == LinkKind::periodic || kind == LinkKind::interface) {
      throw Error(ErrorCode::invalid_argument, "tag_boundary only takes dirichlet-zero or far-field");
    }
    set_link(edge, {kind, -1, -1, -1});
  }

  void pair_periodic(int a, int b) {
    const double la = edge_length(a), lb = edge_length(b);
    if (std::abs(la - lb) > 1e-12) {
      throw Error(ErrorCode::invalid_argument, "periodic edges differ in length");
    }
    // Partners traverse opposite directions once translated.
    const Vec2 da = edge_endpoint(a, 1) - edge_endpoint(a, 0);
    const Vec2 db = edge_endpoint(b, 1) - edge_endpoint(b, 0);
    if (norm(da + db) > 1e-12 * std::max(1.0, la)) {
      throw Error(ErrorCode::invalid_argument, "periodic edges have inconsistent orientation");
    }
    set_link(a, {LinkKind::periodic, b, -1, -1});
    set_link(b, {LinkKind::periodic, a, -1, -1});
  }

  void add_zone(InterfaceZone zone) {
    const int z = static_cast<int>(zones_.size());
    for (int s = 0; s < 2; ++s) {
      for (int e : zone.side(s)) set_link(e, {LinkKind::interface, -1, z, s});
    }
    zones_.push_back(std::move(zone));
  }

  /// Checks that every side is accounted for and every element is valid.
  void finalize() {
    for (std::size_t h = 0; h < assigned_.size(); ++h) {
      if (!assigned_[h]) {
        throw Error(ErrorCode::invalid_argument,
                    "edge " + std::to_string(h) + " is neither paired, tagged, nor in an interface zone");
      }
    }
    for (const auto& z : zones_) check_zone(z);
  }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<InterfaceZone>& zones() const { return zones_; }
  const EdgeLink& link(int edge) const { return links_[edge]; }
  const ElementMap& element_map(int e) const { return maps_[e]; }
  EdgeTrace edge_trace(int edge) const { return EdgeTrace(&maps_[edge_element(edge)], edge_local(edge)); }

  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_half_edges() const { return 4 * num_elements(); }

  int count_links(LinkKind k) const {
    return static_cast<int>(std::count_if(links_.begin(), links_.end(), [k](const EdgeLink& l) { return l.kind == k; }));
  }
  int conformal_pairs() const { return count_links(LinkKind::conformal) / 2; }
  int periodic_pairs() const { return count_links(LinkKind::periodic) / 2; }
  /// Geometric edges: shared sides counted once.
  int num_unique_edges() const { return num_half_edges() - conformal_pairs() - periodic_pairs(); }

  /// t = -1 -> 0, t = +1 -> 1.
  Vec2 edge_endpoint(int edge, int end) const { return edge_trace(edge).point(end == 0 ? -1.0 : 1.0); }

  double edge_length(int edge) const {
    const EdgeTrace tr = edge_trace(edge);
    if (tr.straight()) return norm(edge_endpoint(edge, 1) - edge_endpoint(edge, 0));
    static const QuadratureRule rule = gll_rule(16);
    double len = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec2 p, t;
      tr.evaluate(rule.points[q], p, t);
      len += rule.weights[q] * norm(t);
    }
    return len;
  }

 private:
  void set_link(int edge, EdgeLink l) {
    if (edge < 0 || edge >= static_cast<int>(links_.size())) {
      throw Error(ErrorCode::invalid_argument, "edge id out of range");
    }
    if (assigned_[edge] && !(links_[edge].kind == LinkKind::conformal && l.kind == LinkKind::conformal)) {
      throw Error(ErrorCode::invalid_argument, "edge " + std::to_string(edge) + " assigned twice");
    }
    links_[edge] = l;
    assigned_[edge] = true;
  }

  void check_zone(const InterfaceZone& z) const {
    for (int s = 0; s < 2; ++s) {
      const auto& edges = z.side(s);
      if (edges.empty()) throw Error(ErrorCode::invalid_argument, "interface zone side is empty");
      double covered = 0.0;
      double prev_end = 0.0;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        double a = z.arc(edge_endpoint(edges[i], 0));
        double b = z.arc(edge_endpoint(edges[i], 1));
        if (a > b) std::swap(a, b);
        if (i == 0 && std::abs(a) > 1e-10 * z.length) {
          throw Error(ErrorCode::invalid_argument, "interface side does not start at the zone origin");
        }
        if (i > 0 && std::abs(a - prev_end) > 1e-10 * z.length) {
          throw Error(ErrorCode::invalid_argument, "interface side has a gap or overlap");
        }
        prev_end = b;
        covered += b - a;
      }
      if (std::abs(prev_end - z.length) > 1e-10 * z.length || std::abs(covered - z.length) > 1e-10 * z.length) {
        throw Error(ErrorCode::invalid_argument, "interface side does not cover the zone");
      }
    }
  }

  std::vector<Vec2> vertices_;
  std::vector<Element> elements_;
  std::vector<ElementMap> maps_;
  std::vector<EdgeLink> links_;
  std::vector<bool> assigned_;
  std::vector<InterfaceZone> zones_;
};

namespace detail {

inline LinkKind boundary_link(BoundaryKind k) {
  return k == BoundaryKind::far_field ? LinkKind::far_field : LinkKind::dirichlet_zero;
}

// One structured column of cells: x-breaks by global index, y-breaks given.
struct Column {
  int first_element = 0;
  int nx = 0;
  int ny = 0;

  int element(int i, int j) const { return first_element + j * nx + i; }
};

inline Column append_column(std::vector<Vec2>& vertices, std::vector<Element>& elements,
                            const std::vector<double>& xs, const std::vector<double>& ys) {
  Column c;
  c.first_element = static_cast<int>(elements.size());
  c.nx = static_cast<int>(xs.size()) - 1;
  c.ny = static_cast<int>(ys.size()) - 1;
  const int base = static_cast<int>(vertices.size());
  for (double y : ys) {
    for (double x : xs) vertices.push_back({x, y});
  }
  const int stride = c.nx + 1;
  for (int j = 0; j < c.ny; ++j) {
    for (int i = 0; i < c.nx; ++i) {
      Element el;
      const int v0 = base + j * stride + i;
      el.vertex_ids = {v0, v0 + 1, v0 + 1 + stride, v0 + stride};
      elements.push_back(el);
    }
  }
  return c;
}

inline void check_domain(const Rect& d) {
  if (!(d.width() > 0.0) || !(d.height() > 0.0) || !std::isfinite(d.width()) || !std::isfinite(d.height())) {
    throw Error(ErrorCode::invalid_argument, "degenerate domain");
  }
}

inline void check_periodic_spec(const BoundarySpec& b) {
  if ((b.left == BoundaryKind::periodic) != (b.right == BoundaryKind::periodic) ||
      (b.bottom == BoundaryKind::periodic) != (b.top == BoundaryKind::periodic)) {
    throw Error(ErrorCode::invalid_argument, "periodic boundaries must come in opposite pairs");
  }
}

}  // namespace detail

/// nx * ny equal axis-aligned quads, elements numbered row by row.
inline Mesh build_cartesian_mesh(const Rect& domain, int nx, int ny, const BoundarySpec& bc) {
  detail::check_domain(domain);
  detail::check_periodic_spec(bc);
  if (nx < 1 || ny < 1) throw Error(ErrorCode::invalid_argument, "nx and ny must be >= 1");
  std::vector<double> xs(nx + 1), ys(ny + 1);
  for (int i = 0; i <= nx; ++i) xs[i] = domain.x0 + domain.width() * i / nx;
  for (int j = 0; j <= ny; ++j) ys[j] = domain.y0 + domain.height() * j / ny;
  xs.back() = domain.x1;
  ys.back() = domain.y1;
  std::vector<Vec2> vertices;
  std::vector<Element> elements;
  const detail::Column c = detail::append_column(vertices, elements, xs, ys);
  Mesh mesh(std::move(vertices), std::move(elements));
  for (int j = 0; j < ny; ++j) {
    const int l = edge_id(c.element(0, j), 3), r = edge_id(c.element(nx - 1, j), 1);
    if (bc.left == BoundaryKind::periodic) {
      mesh.pair_periodic(l, r);
    } else {
      mesh.tag_boundary(l, detail::boundary_link(bc.left));
      mesh.tag_boundary(r, detail::boundary_link(bc.right));
    }
  }
  for (int i = 0; i < nx; ++i) {
    const int b = edge_id(c.element(i, 0), 0), t = edge_id(c.element(i, ny - 1), 2);
    if (bc.bottom == BoundaryKind::periodic) {
      mesh.pair_periodic(b, t);
    } else {
      mesh.tag_boundary(b, detail::boundary_link(bc.bottom));
      mesh.tag_boundary(t, detail::boundary_link(bc.top));
    }
  }
  mesh.finalize();
  return mesh;
}

/// Column layout in cell counts of an nx-wide uniform grid.
struct ColumnLayout {
  std::vector<int> columns;
  int nx = 0;
};

/// Side-by-side Cartesian columns separated by vertical interface zones.
/// Odd-indexed columns (the centre of three, the right of two) are offset
/// vertically by shift * cell height; their extreme rows become partial
/// cells so the domain stays rectangular. shift = 0 keeps every column
/// aligned, giving conformal-equivalent interface zones.
inline Mesh build_shifted_interface_mesh(const Rect& domain, const ColumnLayout& layout, int ny, double shift,
                                         const BoundarySpec& bc) {
  detail::check_domain(domain);
  detail::check_periodic_spec(bc);
  if (ny < 1) throw Error(ErrorCode::invalid_argument, "ny must be >= 1");
  if (!(shift >= 0.0 && shift < 1.0)) throw Error(ErrorCode::invalid_argument, "shift must lie in [0, 1)");
  if (layout.columns.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two columns");
  for (int w : layout.columns) {
    if (w < 1) throw Error(ErrorCode::invalid_argument, "column widths must be >= 1");
  }
  if (std::accumulate(layout.columns.begin(), layout.columns.end(), 0) != layout.nx) {
    throw Error(ErrorCode::invalid_argument, "column widths do not sum to the grid width");
  }
  const int ncol = static_cast<int>(layout.columns.size());
  if (bc.left == BoundaryKind::periodic && shift > 0.0 && (ncol - 1) % 2 == 1) {
    throw Error(ErrorCode::invalid_argument, "x-periodicity needs unshifted outer columns");
  }

  auto xbreak = [&](int i) { return i == layout.nx ? domain.x1 : domain.x0 + domain.width() * i / layout.nx; };
  std::vector<double> plain_ys(ny + 1);
  for (int j = 0; j <= ny; ++j) plain_ys[j] = domain.y0 + domain.height() * j / ny;
  plain_ys.back() = domain.y1;
  std::vector<double> shifted_ys = plain_ys;
  if (shift > 0.0) {
    shifted_ys.assign(1, domain.y0);
    for (int j = 0; j < ny; ++j) shifted_ys.push_back(domain.y0 + domain.height() * (j + shift) / ny);
    shifted_ys.push_back(domain.y1);
  }

  std::vector<Vec2> vertices;
  std::vector<Element> elements;
  std::vector<detail::Column> cols;
  int start = 0;
  for (int c = 0; c < ncol; ++c) {
    std::vector<double> xs;
    for (int i = start; i <= start + layout.columns[c]; ++i) xs.push_back(xbreak(i));
    cols.push_back(detail::append_column(vertices, elements, xs, c % 2 == 1 ? shifted_ys : plain_ys));
    start += layout.columns[c];
  }
  Mesh mesh(std::move(vertices), std::move(elements));

  for (int c = 0; c < ncol; ++c) {
    const auto& col = cols[c];
    for (int i = 0; i < col.nx; ++i) {
      const int b = edge_id(col.element(i, 0), 0), t = edge_id(col.element(i, col.ny - 1), 2);
      if (bc.bottom == BoundaryKind::periodic) {
        mesh.pair_periodic(b, t);
      } else {
        mesh.tag_boundary(b, detail::boundary_link(bc.bottom));
        mesh.tag_boundary(t, detail::boundary_link(bc.top));
      }
    }
  }
  const auto& first = cols.front();
  const auto& last = cols.back();
  if (bc.left == BoundaryKind::periodic && first.ny != last.ny) {
    throw Error(ErrorCode::invalid_argument, "x-periodicity needs matching outer column rows");
  }
  for (int j = 0; j < first.ny; ++j) {
    const int l = edge_id(first.element(0, j), 3);
    if (bc.left == BoundaryKind::periodic) {
      mesh.pair_periodic(l, edge_id(last.element(last.nx - 1, j), 1));
    } else {
      mesh.tag_boundary(l, detail::boundary_link(bc.left));
    }
  }
  if (bc.right != BoundaryKind::periodic) {
    for (int j = 0; j < last.ny; ++j) mesh.tag_boundary(edge_id(last.element(last.nx - 1, j), 1), detail::boundary_link(bc.right));
  }

  start = 0;
  for (int c = 0; c + 1 < ncol; ++c) {
    start += layout.columns[c];
    InterfaceZone z;
    z.origin = {xbreak(start), domain.y0};
    z.direction = {0.0, 1.0};
    z.length = domain.height();
    const auto& a = cols[c];
    const auto& b = cols[c + 1];
    for (int j = 0; j < a.ny; ++j) z.left_edges.push_back(edge_id(a.element(a.nx - 1, j), 1));
    for (int j = 0; j < b.ny; ++j) z.right_edges.push_back(edge_id(b.element(0, j), 3));
    mesh.add_zone(std::move(z));
  }
  mesh.finalize();
  return mesh;
}

}  // namespace ncdg
