#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "ncdg/mesh.hpp"

namespace ncdg {

struct BoundingBox {
  Vec2 lo;
  Vec2 hi;

  bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

/// Axis-aligned box of an edge trace, padded by 1e-8 of the edge length.
/// Curved traces are sampled densely and each coordinate extreme is then
/// polished by golden-section search between the neighbouring samples.
inline BoundingBox edge_bounding_box(const Mesh& mesh, int edge) {
  const EdgeTrace tr = mesh.edge_trace(edge);
  const Vec2 a = tr.point(-1.0), b = tr.point(1.0);
  BoundingBox box{{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
  if (!tr.straight()) {
    constexpr int kSamples = 65;
    std::vector<double> ts(kSamples);
    std::vector<Vec2> ps(kSamples);
    for (int k = 0; k < kSamples; ++k) {
      ts[k] = -1.0 + 2.0 * k / (kSamples - 1);
      ps[k] = tr.point(ts[k]);
    }
    auto polish = [&](auto coord, double sign) {
      int best = 0;
      for (int k = 1; k < kSamples; ++k) {
        if (sign * coord(ps[k]) > sign * coord(ps[best])) best = k;
      }
      double lo = ts[std::max(0, best - 1)], hi = ts[std::min(kSamples - 1, best + 1)];
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 60; ++it) {
        const double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
        if (sign * coord(tr.point(c)) > sign * coord(tr.point(d))) hi = d; else lo = c;
      }
      return std::max(sign * coord(ps[best]), sign * coord(tr.point(0.5 * (lo + hi)))) * sign;
    };
    auto cx = [](Vec2 p) { return p.x; };
    auto cy = [](Vec2 p) { return p.y; };
    box.lo = {std::min(box.lo.x, polish(cx, -1.0)), std::min(box.lo.y, polish(cy, -1.0))};
    box.hi = {std::max(box.hi.x, polish(cx, 1.0)), std::max(box.hi.y, polish(cy, 1.0))};
  }
  const double pad = 1e-8 * mesh.edge_length(edge);
  box.lo = box.lo - Vec2{pad, pad};
  box.hi = box.hi + Vec2{pad, pad};
  return box;
}

/// R-tree over the bounding boxes of a set of edges.
class EdgeIndex {
  using Point = boost::geometry::model::point<double, 2, boost::geometry::cs::cartesian>;
  using Box = boost::geometry::model::box<Point>;
  using Value = std::pair<Box, int>;

 public:
  EdgeIndex() = default;

  EdgeIndex(const Mesh& mesh, std::span<const int> edges) {
    std::vector<Value> values;
    values.reserve(edges.size());
    for (int e : edges) {
      const BoundingBox b = edge_bounding_box(mesh, e);
      values.emplace_back(Box(Point(b.lo.x, b.lo.y), Point(b.hi.x, b.hi.y)), e);
    }
    tree_ = Tree(values.begin(), values.end());
  }

  /// Edges whose padded box intersects the square of half-width `radius`
  /// around p (radius 0: boxes containing p). Sorted by edge id.
  std::vector<int> candidates(Vec2 p, double radius = 0.0) const {
    const Box query(Point(p.x - radius, p.y - radius), Point(p.x + radius, p.y + radius));
    std::vector<Value> hits;
    tree_.query(boost::geometry::index::intersects(query), std::back_inserter(hits));
    std::vector<int> ids;
    ids.reserve(hits.size());
    for (const auto& h : hits) ids.push_back(h.second);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  std::size_t size() const { return tree_.size(); }

 private:
  using Tree = boost::geometry::index::rtree<Value, boost::geometry::index::quadratic<16>>;
  Tree tree_;
};

/// One index per side of an interface zone.
struct ZoneIndex {
  EdgeIndex left;
  EdgeIndex right;

  const EdgeIndex& side(int s) const { return s == 0 ? left : right; }
};

inline ZoneIndex edge_bounding_boxes(const Mesh& mesh, const InterfaceZone& zone) {
  return {EdgeIndex(mesh, zone.left_edges), EdgeIndex(mesh, zone.right_edges)};
}

}  // namespace ncdg
