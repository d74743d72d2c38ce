#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ncdg/basis.hpp"
#include "ncdg/mesh.hpp"
#include "ncdg/mesh_io.hpp"
#include "ncdg/point_location.hpp"
#include "ncdg/spatial_index.hpp"

using namespace ncdg;

namespace {

Mesh vortex_shifted(double shift) {
  BoundarySpec bc{BoundaryKind::periodic, BoundaryKind::periodic, BoundaryKind::far_field, BoundaryKind::far_field};
  return build_shifted_interface_mesh({-5, 5, -5, 5}, {{7, 7, 7}, 21}, 21, shift, bc);
}

Mesh gaussian_shifted(double shift) {
  return build_shifted_interface_mesh({-2, 2, -2, 2}, {{8, 8}, 16}, 16, shift,
                                      BoundarySpec::all(BoundaryKind::dirichlet_zero));
}

// One quadratic element whose bottom side is the parabola
// (t, -1 + c (1 - t^2)); the other sides are straight.
Mesh parabolic_element(double c) {
  const auto gll = gll_rule(3).points;
  std::vector<Vec2> nodes;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const double x = gll[i], y = gll[j];
      const double bump = j == 0 ? c * (1.0 - x * x) : (j == 1 ? 0.5 * c * (1.0 - x * x) : 0.0);
      nodes.push_back({x, y + bump});
    }
  }
  std::vector<Vec2> verts = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  Element e;
  e.vertex_ids = {0, 1, 2, 3};
  e.geometry_order = 2;
  e.geometry_nodes = nodes;
  Mesh m(verts, {e});
  for (int l = 0; l < 4; ++l) m.tag_boundary(l, LinkKind::dirichlet_zero);
  m.finalize();
  return m;
}

// Distance from y to the trace by dense sampling followed by golden-section
// refinement around the best sample.
double oracle_distance(const EdgeTrace& tr, Vec2 y, double* at = nullptr) {
  constexpr int n = 4001;
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double t = -1.0 + 2.0 * k / (n - 1);
    const double d = norm(tr.point(t) - y);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  double lo = -1.0 + 2.0 * std::max(0, best - 1) / (n - 1);
  double hi = -1.0 + 2.0 * std::min(n - 1, best + 1) / (n - 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    if (norm(tr.point(c) - y) < norm(tr.point(d) - y)) hi = d; else lo = c;
  }
  const double t = 0.5 * (lo + hi);
  if (at) *at = t;
  return std::min(bd, norm(tr.point(t) - y));
}

}  // namespace

TEST(CartesianMesh, TwoByTwoCounts) {
  const Mesh m = build_cartesian_mesh({-1, 1, -1, 1}, 2, 2, BoundarySpec::all(BoundaryKind::dirichlet_zero));
  EXPECT_EQ(m.num_elements(), 4);
  EXPECT_EQ(m.num_unique_edges(), 12);
  EXPECT_EQ(m.conformal_pairs(), 4);
  EXPECT_EQ(m.count_links(LinkKind::dirichlet_zero), 8);
}

TEST(CartesianMesh, BenchmarkSizes) {
  const Mesh v = build_cartesian_mesh({-5, 5, -5, 5}, 21, 21, BoundarySpec::all(BoundaryKind::periodic));
  EXPECT_EQ(v.num_elements(), 441);
  const Mesh c = build_cartesian_mesh({-5, 5, -5, 5}, 9, 9, BoundarySpec::all(BoundaryKind::periodic));
  EXPECT_EQ(c.num_elements(), 81);
  EXPECT_EQ(c.periodic_pairs(), 18);
  EXPECT_EQ(c.conformal_pairs(), 2 * 9 * 8);
}

TEST(CartesianMesh, RejectsDegenerateInput) {
  EXPECT_THROW(build_cartesian_mesh({0, 0, 0, 1}, 2, 2, BoundarySpec{}), Error);
  EXPECT_THROW(build_cartesian_mesh({0, 1, 0, 1}, 0, 2, BoundarySpec{}), Error);
  BoundarySpec half{BoundaryKind::periodic, BoundaryKind::far_field, BoundaryKind::periodic, BoundaryKind::periodic};
  EXPECT_THROW(build_cartesian_mesh({0, 1, 0, 1}, 2, 2, half), Error);
}

TEST(CartesianMesh, EdgeGeometryInvariants) {
  const Mesh m = build_cartesian_mesh({-5, 5, -5, 5}, 9, 9, BoundarySpec::all(BoundaryKind::periodic));
  const auto q = gll_rule(7);
  for (int h = 0; h < m.num_half_edges(); ++h) {
    const EdgeTrace tr = m.edge_trace(h);
    for (double t : q.points) EXPECT_NEAR(norm(tr.normal(t)), 1.0, 1e-13);
    const auto& el = m.elements()[edge_element(h)];
    const Vec2 a = m.vertices()[el.vertex_ids[edge_local(h)]];
    const Vec2 b = m.vertices()[el.vertex_ids[(edge_local(h) + 1) % 4]];
    EXPECT_LE(norm(tr.point(-1.0) - a), 1e-13);
    EXPECT_LE(norm(tr.point(1.0) - b), 1e-13);
  }
}

TEST(CartesianMesh, EveryEdgeAssignedExactlyOnce) {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  Element e;
  e.vertex_ids = {0, 1, 2, 3};
  Mesh m(v, {e});
  m.tag_boundary(0, LinkKind::dirichlet_zero);
  EXPECT_THROW(m.tag_boundary(0, LinkKind::far_field), Error);
  EXPECT_THROW(m.finalize(), Error);
}

TEST(ShiftedMesh, VortexLayoutCounts) {
  const Mesh m = vortex_shifted(0.5);
  EXPECT_EQ(m.num_elements(), 7 * 21 + 7 * 22 + 7 * 21);
  ASSERT_EQ(m.zones().size(), 2u);
  EXPECT_EQ(m.zones()[0].left_edges.size(), 21u);
  EXPECT_EQ(m.zones()[0].right_edges.size(), 22u);
  EXPECT_EQ(m.zones()[1].left_edges.size(), 22u);
  EXPECT_EQ(m.zones()[1].right_edges.size(), 21u);
}

TEST(ShiftedMesh, GaussianLayoutHasOneZone) {
  const Mesh m = gaussian_shifted(0.5);
  ASSERT_EQ(m.zones().size(), 1u);
  EXPECT_EQ(m.num_elements(), 8 * 16 + 8 * 17);
  EXPECT_EQ(m.zones()[0].origin.x, 0.0);
}

TEST(ShiftedMesh, ZoneLengthsAndNormals) {
  for (double shift : {0.0, 0.25, 0.5}) {
    const Mesh m = vortex_shifted(shift);
    for (const auto& z : m.zones()) {
      double left = 0.0, right = 0.0;
      for (int e : z.left_edges) left += m.edge_length(e);
      for (int e : z.right_edges) right += m.edge_length(e);
      EXPECT_NEAR(left, right, 1e-10);
      EXPECT_NEAR(left, z.length, 1e-10);
      const Vec2 nl = m.edge_trace(z.left_edges[0]).normal(0.0);
      for (int e : z.right_edges) {
        const Vec2 nr = m.edge_trace(e).normal(0.3);
        EXPECT_NEAR(nl.x + nr.x, 0.0, 1e-12);
        EXPECT_NEAR(nl.y + nr.y, 0.0, 1e-12);
      }
    }
  }
}

TEST(ShiftedMesh, JacobianPositiveAtQuadraturePoints) {
  const auto q = gll_rule(12);
  for (const Mesh& m : {vortex_shifted(0.5), gaussian_shifted(0.5)}) {
    for (int e = 0; e < m.num_elements(); ++e) {
      for (double a : q.points) {
        for (double b : q.points) {
          Vec2 p;
          MapJacobian J;
          m.element_map(e).evaluate(a, b, p, J);
          EXPECT_GT(J.det(), 0.0);
        }
      }
    }
  }
}

TEST(ShiftedMesh, ZeroShiftAlignsEveryEdge) {
  const Mesh m = vortex_shifted(0.0);
  for (const auto& z : m.zones()) {
    ASSERT_EQ(z.left_edges.size(), z.right_edges.size());
    for (std::size_t i = 0; i < z.left_edges.size(); ++i) {
      const Vec2 a0 = m.edge_endpoint(z.left_edges[i], 0), a1 = m.edge_endpoint(z.left_edges[i], 1);
      const Vec2 b0 = m.edge_endpoint(z.right_edges[i], 0), b1 = m.edge_endpoint(z.right_edges[i], 1);
      EXPECT_LE(norm(a0 - b1), 1e-14);
      EXPECT_LE(norm(a1 - b0), 1e-14);
    }
  }
}

TEST(ShiftedMesh, RejectsInconsistentLayouts) {
  BoundarySpec bc = BoundarySpec::all(BoundaryKind::dirichlet_zero);
  EXPECT_THROW(build_shifted_interface_mesh({0, 1, 0, 1}, {{3, 3}, 7}, 4, 0.5, bc), Error);
  EXPECT_THROW(build_shifted_interface_mesh({0, 1, 0, 1}, {{3, 4}, 7}, 4, 1.0, bc), Error);
  EXPECT_THROW(build_shifted_interface_mesh({0, 1, 0, 1}, {{7}, 7}, 4, 0.5, bc), Error);
}

TEST(SpatialIndex, PointInsideAndSharedEndpoint) {
  const Mesh m = gaussian_shifted(0.5);
  const auto& z = m.zones()[0];
  const ZoneIndex idx = edge_bounding_boxes(m, z);
  const int e = z.right_edges[3];
  const Vec2 mid = m.edge_trace(e).point(0.0);
  const auto c = idx.right.candidates(mid);
  EXPECT_NE(std::find(c.begin(), c.end(), e), c.end());
  const Vec2 shared = m.edge_endpoint(z.right_edges[3], 0);  // right edges run downward
  const auto c2 = idx.right.candidates(shared);
  EXPECT_NE(std::find(c2.begin(), c2.end(), z.right_edges[3]), c2.end());
  EXPECT_NE(std::find(c2.begin(), c2.end(), z.right_edges[4]), c2.end());
}

TEST(SpatialIndex, CompleteAgainstExhaustiveScan) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> shift_dist(0.05, 0.95);
  for (int trial = 0; trial < 5; ++trial) {
    const Mesh m = build_shifted_interface_mesh({-1, 1, -1, 1}, {{3, 4}, 7}, 5 + trial, shift_dist(rng),
                                                BoundarySpec::all(BoundaryKind::dirichlet_zero));
    const auto& z = m.zones()[0];
    const ZoneIndex idx = edge_bounding_boxes(m, z);
    std::uniform_real_distribution<double> s(0.0, z.length);
    for (int k = 0; k < 200; ++k) {
      const Vec2 p = z.origin + s(rng) * z.direction;
      for (int side = 0; side < 2; ++side) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int e : z.side(side)) {
          const double d = locate_point_on_edge(m.edge_trace(e), p).distance;
          if (d < bd) {
            bd = d;
            best = e;
          }
        }
        const auto c = idx.side(side).candidates(p);
        EXPECT_NE(std::find(c.begin(), c.end(), best), c.end());
      }
    }
  }
}

TEST(PointLocation, StraightEdgeExamples) {
  std::vector<Vec2> v = {{-1, 0}, {0, 0}, {0, 1}, {-1, 1}};
  Element e;
  e.vertex_ids = {0, 1, 2, 3};
  Mesh m(v, {e});
  for (int l = 0; l < 4; ++l) m.tag_boundary(l, LinkKind::dirichlet_zero);
  m.finalize();
  const EdgeTrace right = m.edge_trace(1);  // (0,0) -> (0,1)
  auto loc = locate_point_on_edge(right, {0.0, 0.5});
  EXPECT_NEAR(loc.xi, 0.0, 1e-15);
  EXPECT_NEAR(loc.distance, 0.0, 1e-15);
  loc = locate_point_on_edge(right, {0.3, 0.5});
  EXPECT_NEAR(loc.xi, 0.0, 1e-15);
  EXPECT_NEAR(loc.distance, 0.3, 1e-15);
}

TEST(PointLocation, IterativeMatchesProjectionOnStraightEdges) {
  const Mesh m = build_cartesian_mesh({-2, 3, -1, 4}, 3, 2, BoundarySpec::all(BoundaryKind::far_field));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-3.0, 5.0);
  LocateOptions it;
  it.force_iterative = true;
  for (int h = 0; h < m.num_half_edges(); ++h) {
    for (int k = 0; k < 20; ++k) {
      const Vec2 y{d(rng), d(rng)};
      const auto a = locate_point_on_edge(m.edge_trace(h), y);
      const auto b = locate_point_on_edge(m.edge_trace(h), y, it);
      EXPECT_NEAR(a.xi, b.xi, 1e-12);
      EXPECT_NEAR(a.distance, b.distance, 1e-12);
    }
  }
}

TEST(PointLocation, CurvedEdgeRecoversOnCurvePoints) {
  const Mesh m = parabolic_element(0.3);
  const EdgeTrace bottom = m.edge_trace(0);
  ASSERT_FALSE(bottom.straight());
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> t(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double t0 = t(rng);
    const Vec2 y = bottom.point(t0);
    EXPECT_NEAR(y.y, -1.0 + 0.3 * (1.0 - t0 * t0), 1e-13);
    const auto loc = locate_point_on_edge(bottom, y);
    EXPECT_LE(norm(bottom.point(loc.xi) - y), 1e-10);
    EXPECT_LE(oracle_distance(bottom, y), 1e-10);
  }
}

TEST(PointLocation, CurvedEdgeOffCurveMatchesOracle) {
  const Mesh m = parabolic_element(0.3);
  const EdgeTrace bottom = m.edge_trace(0);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> x(-1.5, 1.5), y(-1.6, -0.6);
  for (int k = 0; k < 50; ++k) {
    const Vec2 p{x(rng), y(rng)};
    const auto loc = locate_point_on_edge(bottom, p);
    const double ref = oracle_distance(bottom, p);
    EXPECT_NEAR(loc.distance, ref, 1e-9);
  }
}

TEST(OpposingEdge, AlignedZoneFindsFacingEdge) {
  const Mesh m = vortex_shifted(0.0);
  const auto& z = m.zones()[0];
  const ZoneIndex idx = edge_bounding_boxes(m, z);
  const auto q = gll_rule(7);
  for (std::size_t i = 0; i < z.left_edges.size(); ++i) {
    for (int k = 1; k + 1 < 7; ++k) {
      const Vec2 y = m.edge_trace(z.left_edges[i]).point(q.points[k]);
      const auto op = find_opposing_edge(m, idx, 0, y);
      EXPECT_EQ(op.edge, z.right_edges[i]);
      EXPECT_NEAR(op.xi, -q.points[k], 1e-12);
    }
  }
}

TEST(OpposingEdge, HalfShiftSplitsEachLeftEdge) {
  // Left edge j spans [j, j+1] h; right edge k >= 1 spans [k - 1/2, k + 1/2] h
  // and runs downward. A half-cell shift puts every left midpoint on a right
  // vertex, so the quarter points are the interior probes: t = +1/2 lies in
  // right edge j+1 at its reference coordinate +1/2, t = -1/2 in right edge j
  // at -1/2 (j >= 1). The end edges are half cells, so the expected
  // coordinate comes from the endpoints. The midpoint resolves to the lower id.
  const Mesh m = gaussian_shifted(0.5);
  const auto& z = m.zones()[0];
  const ZoneIndex idx = edge_bounding_boxes(m, z);
  auto ref = [&](int e, Vec2 y) {
    const Vec2 a = m.edge_endpoint(e, 0), b = m.edge_endpoint(e, 1);
    return -1.0 + 2.0 * (y.y - a.y) / (b.y - a.y);
  };
  for (std::size_t j = 0; j < z.left_edges.size(); ++j) {
    const EdgeTrace left = m.edge_trace(z.left_edges[j]);
    auto op = find_opposing_edge(m, idx, 0, left.point(0.5));
    EXPECT_EQ(op.edge, z.right_edges[j + 1]);
    EXPECT_NEAR(op.xi, ref(op.edge, left.point(0.5)), 1e-12);
    if (j >= 1) {
      op = find_opposing_edge(m, idx, 0, left.point(-0.5));
      EXPECT_EQ(op.edge, z.right_edges[j]);
      EXPECT_NEAR(op.xi, -0.5, 1e-12);
      EXPECT_NEAR(op.xi, ref(op.edge, left.point(-0.5)), 1e-12);
    }
    op = find_opposing_edge(m, idx, 0, left.point(0.0));
    EXPECT_EQ(op.edge, std::min(z.right_edges[j], z.right_edges[j + 1]));
  }
}

TEST(OpposingEdge, SharedVertexTieBreaksToLowestId) {
  const Mesh m = gaussian_shifted(0.5);
  const auto& z = m.zones()[0];
  const ZoneIndex idx = edge_bounding_boxes(m, z);
  for (std::size_t k = 0; k + 1 < z.right_edges.size(); ++k) {
    const int a = z.right_edges[k], b = z.right_edges[k + 1];
    const Vec2 shared = m.edge_endpoint(a, 0);
    ASSERT_LE(norm(shared - m.edge_endpoint(b, 1)), 1e-14);
    const auto op = find_opposing_edge(m, idx, 0, shared);
    EXPECT_EQ(op.edge, std::min(a, b));
  }
}

TEST(OpposingEdge, OffInterfacePointIsACoverageError) {
  const Mesh m = gaussian_shifted(0.5);
  const ZoneIndex idx = edge_bounding_boxes(m, m.zones()[0]);
  try {
    find_opposing_edge(m, idx, 0, {0.5, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::interface_coverage);
  }
}

TEST(OpposingEdge, InvolutiveOnSpanInteriors) {
  const Mesh m = vortex_shifted(0.5);
  for (const auto& z : m.zones()) {
    const ZoneIndex idx = edge_bounding_boxes(m, z);
    for (int side = 0; side < 2; ++side) {
      for (int e : z.side(side)) {
        for (double t : {-0.61, -0.2, 0.17, 0.55}) {
          const Vec2 y = m.edge_trace(e).point(t);
          const auto there = find_opposing_edge(m, idx, side, y);
          const Vec2 y2 = m.edge_trace(there.edge).point(there.xi);
          const auto back = find_opposing_edge(m, idx, 1 - side, y2);
          EXPECT_EQ(back.edge, e);
        }
      }
    }
  }
}

TEST(MeshIo, RoundTripIsStable) {
  for (const Mesh& m : {vortex_shifted(0.5), gaussian_shifted(0.5), parabolic_element(0.2),
                        build_cartesian_mesh({-1, 1, -1, 1}, 2, 2, BoundarySpec::all(BoundaryKind::periodic))}) {
    const std::string text = mesh_to_string(m);
    std::istringstream is(text);
    const Mesh back = read_mesh(is);
    EXPECT_EQ(mesh_to_string(back), text);
    EXPECT_EQ(back.num_elements(), m.num_elements());
    EXPECT_EQ(back.conformal_pairs(), m.conformal_pairs());
    EXPECT_EQ(back.periodic_pairs(), m.periodic_pairs());
    EXPECT_EQ(back.zones().size(), m.zones().size());
  }
}

TEST(MeshIo, MalformedInputIsAParseError) {
  for (const char* text : {"", "ncdg-mesh 2\n", "ncdg-mesh 1\nvertices 2\n0 0\n", "ncdg-mesh 1\nvertex 0\n",
                           "ncdg-mesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\nelements 1\n0 1 2 3 1\nboundary 1\n0 wall\n"}) {
    std::istringstream is(text);
    try {
      read_mesh(is);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::parse) << text;
    }
  }
}
