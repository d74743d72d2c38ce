#pragma once

// Exterior-trace and flux treatments for interface zones. Every handler fills
// the numerical normal flux at the trace quadrature points of all edges of
// its zone and records the zone's conservation defect
//   sum over both sides of  sum_q w_q |J_s| f~_q.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncdg/discretization.hpp"
#include "ncdg/point_location.hpp"
#include "ncdg/spatial_index.hpp"
#include "ncdg/trace.hpp"

namespace ncdg {

enum class InterfaceMethod { conformal, mortar, p2p };

inline std::string_view to_string(InterfaceMethod m) {
  switch (m) {
    case InterfaceMethod::conformal: return "conformal";
    case InterfaceMethod::mortar: return "mortar";
    case InterfaceMethod::p2p: return "p2p";
  }
  return "unknown";
}

inline InterfaceMethod parse_method(std::string_view s) {
  if (s == "conformal") return InterfaceMethod::conformal;
  if (s == "mortar") return InterfaceMethod::mortar;
  if (s == "p2p") return InterfaceMethod::p2p;
  throw Error(ErrorCode::invalid_argument, "unknown interface method '" + std::string(s) + "'");
}

/// True when the edge's parameter runs against the zone's arc coordinate.
inline bool runs_against_arc(const Mesh& mesh, const InterfaceZone& zone, int edge) {
  return zone.arc(mesh.edge_endpoint(edge, 1)) < zone.arc(mesh.edge_endpoint(edge, 0));
}

/// Arc interval [lo, hi] covered by an edge.
inline std::array<double, 2> arc_span(const Mesh& mesh, const InterfaceZone& zone, int edge) {
  const double a = zone.arc(mesh.edge_endpoint(edge, 0));
  const double b = zone.arc(mesh.edge_endpoint(edge, 1));
  return {std::min(a, b), std::max(a, b)};
}

template <class Model>
class InterfaceHandler {
 public:
  InterfaceHandler(const Discretization& disc, int zone) : disc_(&disc), zone_(zone) {}
  virtual ~InterfaceHandler() = default;

  virtual std::string_view name() const = 0;
  virtual void compute(const Model& model, TraceData& tr) = 0;

  int zone_index() const { return zone_; }
  const InterfaceZone& zone() const { return disc_->mesh().zones()[zone_]; }
  /// Per-variable defect of the most recent compute().
  const std::vector<double>& defect() const { return defect_; }
  double max_abs_defect() const {
    double m = 0.0;
    for (double d : defect_) m = std::max(m, std::abs(d));
    return m;
  }

 protected:
  void measure_defect(const TraceData& tr) {
    defect_.assign(tr.n_vars, 0.0);
    for (int s = 0; s < 2; ++s) {
      for (int h : zone().side(s)) {
        const auto& wj = disc_->edge_geometry(h).weight_jac;
        for (int q = 0; q < tr.nq; ++q) {
          const double* f = tr.flux_at(h, q);
          for (int v = 0; v < tr.n_vars; ++v) defect_[v] += wj[q] * f[v];
        }
      }
    }
  }

  const Discretization* disc_;
  int zone_;
  std::vector<double> defect_;
};

// ---------------------------------------------------------------------------
// Aligned zones: edges pair one to one, flux computed once per pair.

template <class Model>
class ConformalNullHandler final : public InterfaceHandler<Model> {
 public:
  ConformalNullHandler(const Discretization& disc, int zone) : InterfaceHandler<Model>(disc, zone) {
    const Mesh& mesh = disc.mesh();
    const auto& z = this->zone();
    if (z.left_edges.size() != z.right_edges.size()) {
      throw Error(ErrorCode::invalid_argument, "conformal treatment needs an aligned interface zone");
    }
    for (std::size_t i = 0; i < z.left_edges.size(); ++i) {
      const int a = z.left_edges[i], b = z.right_edges[i];
      const auto sa = arc_span(mesh, z, a), sb = arc_span(mesh, z, b);
      if (std::abs(sa[0] - sb[0]) > 1e-10 * z.length || std::abs(sa[1] - sb[1]) > 1e-10 * z.length) {
        throw Error(ErrorCode::invalid_argument, "conformal treatment needs an aligned interface zone");
      }
      pairs_.push_back({a, b, runs_against_arc(mesh, z, a) != runs_against_arc(mesh, z, b)});
    }
  }

  std::string_view name() const override { return "conformal"; }

  void compute(const Model& model, TraceData& tr) override {
    const int Q = tr.nq, nv = tr.n_vars;
    for (const auto& p : pairs_) {
      const auto& g = this->disc_->edge_geometry(p.left);
      for (int q = 0; q < Q; ++q) {
        const int qr = p.opposite ? Q - 1 - q : q;
        const double* um = tr.interior_at(p.left, q);
        const double* up = tr.interior_at(p.right, qr);
        std::copy(up, up + nv, tr.exterior_at(p.left, q));
        std::copy(um, um + nv, tr.exterior_at(p.right, qr));
        double* fl = tr.flux_at(p.left, q);
        model.numerical_flux(um, up, g.normals[q], g.points[q], fl);
        double* fr = tr.flux_at(p.right, qr);
        for (int v = 0; v < nv; ++v) fr[v] = -fl[v];
      }
    }
    this->measure_defect(tr);
  }

 private:
  struct Pair {
    int left, right;
    bool opposite;
  };
  std::vector<Pair> pairs_;
};

// ---------------------------------------------------------------------------
// Point-to-point interpolation.

struct P2PEntry {
  int edge = -1;  // opposing edge
  double xi = 0.0;
  double distance = 0.0;
};

/// For every trace quadrature point of every zone edge (left side first, then
/// right, each in zone order), the opposing edge, its reference coordinate,
/// and the cached barycentric row l_k(xi*).
struct P2PMap {
  int n1 = 0;
  int nq = 0;
  std::vector<int> edges;
  std::vector<int> sides;
  std::vector<P2PEntry> entries;  // edges.size() * nq
  std::vector<double> rows;       // entries.size() * n1

  const P2PEntry& entry(std::size_t edge_slot, int q) const { return entries[edge_slot * nq + q]; }
  std::span<const double> row(std::size_t entry_index) const {
    return {rows.data() + entry_index * n1, static_cast<std::size_t>(n1)};
  }
};

inline P2PMap build_p2p_map(const Discretization& disc, const InterfaceZone& zone, const ZoneIndex& index,
                            double tol = 1e-8) {
  const Mesh& mesh = disc.mesh();
  P2PMap map;
  map.n1 = disc.n1();
  map.nq = disc.nq();
  for (int s = 0; s < 2; ++s) {
    for (int h : zone.side(s)) {
      map.edges.push_back(h);
      map.sides.push_back(s);
      const auto& g = disc.edge_geometry(h);
      const Vec2 mid = mesh.edge_trace(h).point(0.0);
      const double nudge = 1e-9 * mesh.edge_length(h);
      for (int q = 0; q < disc.nq(); ++q) {
        // Quadrature points at this edge's ends can sit on a vertex of the
        // far side. The probe, moved slightly towards this edge's interior,
        // selects the opposing edge that overlaps this one.
        const Vec2 y = g.points[q];
        const Vec2 d = mid - y;
        const double len = norm(d);
        const Vec2 probe = len > 0.0 ? y + (nudge / len) * d : y;
        const int edge = find_opposing_edge(mesh, index, s, probe, tol).edge;
        const Location loc = locate_point_on_edge(mesh.edge_trace(edge), y);
        if (loc.distance > tol) {
          throw Error(ErrorCode::interface_coverage, "quadrature point is off its opposing edge");
        }
        const OpposingPoint op{edge, loc.xi, loc.distance};
        map.entries.push_back({op.edge, op.xi, op.distance});
        const std::size_t off = map.rows.size();
        map.rows.resize(off + map.n1);
        disc.basis().eval_basis(op.xi, std::span<double>(map.rows.data() + off, map.n1));
      }
    }
  }
  return map;
}

/// u+ at every mapped point: the opposing nodal trace evaluated at xi*.
inline void p2p_exterior_trace(const P2PMap& map, TraceData& tr) {
  const int n1 = map.n1, nv = tr.n_vars;
  for (std::size_t slot = 0; slot < map.edges.size(); ++slot) {
    const int h = map.edges[slot];
    for (int q = 0; q < map.nq; ++q) {
      const std::size_t k = slot * map.nq + q;
      const P2PEntry& en = map.entries[k];
      const double* row = map.rows.data() + k * n1;
      double* up = tr.exterior_at(h, q);
      for (int v = 0; v < nv; ++v) {
        const double* t = tr.nodal_at(en.edge, v);
        double s = 0.0;
        for (int i = 0; i < n1; ++i) s += row[i] * t[i];
        up[v] = s;
      }
    }
  }
}

template <class Model>
class P2PHandler final : public InterfaceHandler<Model> {
 public:
  P2PHandler(const Discretization& disc, int zone) : InterfaceHandler<Model>(disc, zone) {
    const ZoneIndex index = edge_bounding_boxes(disc.mesh(), this->zone());
    map_ = build_p2p_map(disc, this->zone(), index);
  }

  std::string_view name() const override { return "p2p"; }
  const P2PMap& map() const { return map_; }

  /// Test hook: breaks the partition of unity of one cached row so that a
  /// constant state no longer passes through unchanged.
  void corrupt_entry_for_testing(std::size_t entry, double factor = 1.5) {
    for (int i = 0; i < map_.n1; ++i) map_.rows[entry * map_.n1 + i] *= factor;
  }

  void compute(const Model& model, TraceData& tr) override {
    p2p_exterior_trace(map_, tr);
    for (int h : map_.edges) {
      const auto& g = this->disc_->edge_geometry(h);
      for (int q = 0; q < tr.nq; ++q) {
        model.numerical_flux(tr.interior_at(h, q), tr.exterior_at(h, q), g.normals[q], g.points[q], tr.flux_at(h, q));
      }
    }
    this->measure_defect(tr);
  }

 private:
  P2PMap map_;
};

// ---------------------------------------------------------------------------
// Mortars.

/// One parent edge of a mortar. Reference coordinates are measured along the
/// arc direction; `reversed` records that the edge's own parameter runs the
/// other way, so its nodal values are read and written in reverse order.
struct MortarSide {
  int edge = -1;
  double o = 0.0;
  double s = 1.0;
  bool reversed = false;
  bool identity = false;   // o = 0, s = 1
  Matrix S_to_mortar;      // S[j][p] = int phi_j(z) phi_p(o + s z) dz
  Matrix to_mortar;        // M^-1 S, stored as the equivalent interpolation matrix
  Matrix from_mortar;      // s M^-1 S^T
};

struct MortarPatch {
  int id = 0;
  double arc_lo = 0.0;
  double arc_hi = 0.0;
  std::array<MortarSide, 2> side;
};

namespace detail {

inline MortarSide make_mortar_side(const Discretization& disc, int edge, bool reversed, double o, double s) {
  const int n1 = disc.n1();
  MortarSide m;
  m.edge = edge;
  m.o = o;
  m.s = s;
  m.reversed = reversed;
  m.identity = std::abs(o) <= 1e-14 && std::abs(s - 1.0) <= 1e-14;
  if (m.identity) {
    m.S_to_mortar = disc.mass1();
    m.to_mortar = Matrix::Identity(n1, n1);
    m.from_mortar = Matrix::Identity(n1, n1);
    return m;
  }
  const auto& quad = disc.quad();
  const Matrix& B = disc.B();
  std::vector<double> mapped(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q) mapped[q] = o + s * quad.points[q];
  const Matrix Bp = interpolation_matrix(disc.basis(), mapped);
  m.S_to_mortar = Matrix::Zero(n1, n1);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    for (int j = 0; j < n1; ++j) {
      for (int p = 0; p < n1; ++p) m.S_to_mortar(j, p) += quad.weights[q] * B(q, j) * Bp(q, p);
    }
  }
  // M^-1 S restricted to degree-P traces is evaluation at the mapped mortar
  // nodes; the interpolation form keeps constants exact to rounding.
  std::vector<double> mapped_nodes(n1);
  for (int k = 0; k < n1; ++k) mapped_nodes[k] = o + s * disc.basis().nodes()[k];
  m.to_mortar = interpolation_matrix(disc.basis(), mapped_nodes);
  m.from_mortar = s * disc.mass1_inv() * m.S_to_mortar.transpose();
  return m;
}

}  // namespace detail

/// Mortars are the intersections of left and right edge spans along the arc.
/// Breakpoints closer than 1e-10 of the zone length are merged; slivers with
/// s < 1e-10 on either parent are dropped once the tiling still holds to 1e-9.
inline std::vector<MortarPatch> build_mortars(const Discretization& disc, const InterfaceZone& zone) {
  const Mesh& mesh = disc.mesh();
  const double snap = 1e-10 * zone.length;
  struct Span {
    int edge;
    double lo, hi;
    bool reversed;
  };
  std::array<std::vector<Span>, 2> spans;
  std::vector<double> breaks;
  for (int s = 0; s < 2; ++s) {
    for (int h : zone.side(s)) {
      const auto a = arc_span(mesh, zone, h);
      spans[s].push_back({h, a[0], a[1], runs_against_arc(mesh, zone, h)});
      breaks.push_back(a[0]);
      breaks.push_back(a[1]);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> merged;
  for (double b : breaks) {
    if (merged.empty() || b - merged.back() > snap) merged.push_back(b);
  }
  // Span ends take the merged break values, so patches on one edge tile
  // [-1, 1] without rounding gaps between their o and s.
  auto snapped = [&](double x) {
    const auto it = std::lower_bound(merged.begin(), merged.end(), x - snap);
    return (it != merged.end() && std::abs(*it - x) <= snap) ? *it : x;
  };
  for (auto& side : spans) {
    for (auto& sp : side) {
      sp.lo = snapped(sp.lo);
      sp.hi = snapped(sp.hi);
    }
  }

  auto owner = [&](int s, double mid) -> const Span* {
    for (const auto& sp : spans[s]) {
      if (mid >= sp.lo - snap && mid <= sp.hi + snap) return &sp;
    }
    return nullptr;
  };

  std::vector<MortarPatch> patches;
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    const double lo = merged[k], hi = merged[k + 1];
    const double mid = 0.5 * (lo + hi);
    MortarPatch patch;
    patch.arc_lo = lo;
    patch.arc_hi = hi;
    bool sliver = false;
    for (int s = 0; s < 2; ++s) {
      const Span* sp = owner(s, mid);
      if (!sp) throw Error(ErrorCode::interface_coverage, "mortar interval not covered by both sides");
      // Local coordinate of each break, computed the same way for both
      // patches that share it; differencing against the large arc value of
      // the midpoint cost ~1e-13 in o.
      const double len = sp->hi - sp->lo;
      auto local = [&](double b) {
        if (b == sp->lo) return -1.0;
        if (b == sp->hi) return 1.0;
        return b - sp->lo <= sp->hi - b ? -1.0 + 2.0 * (b - sp->lo) / len : 1.0 - 2.0 * (sp->hi - b) / len;
      };
      const double xl = local(lo), xh = local(hi);
      const double scale = 0.5 * (xh - xl);
      const double offset = 0.5 * (xh + xl);
      if (scale < 1e-10) sliver = true;
      patch.side[s].edge = sp->edge;
      patch.side[s].o = offset;
      patch.side[s].s = scale;
      patch.side[s].reversed = sp->reversed;
    }
    if (sliver) continue;
    for (int s = 0; s < 2; ++s) {
      const auto& m = patch.side[s];
      patch.side[s] = detail::make_mortar_side(disc, m.edge, m.reversed, m.o, m.s);
    }
    patch.id = static_cast<int>(patches.size());
    patches.push_back(std::move(patch));
  }

  for (int s = 0; s < 2; ++s) {
    for (const auto& sp : spans[s]) {
      double total = 0.0;
      for (const auto& p : patches) {
        if (p.side[s].edge == sp.edge) total += p.side[s].s;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::interface_coverage,
                    "mortars do not tile edge " + std::to_string(sp.edge) + " (sum of scales " + std::to_string(total) + ")");
      }
    }
  }
  return patches;
}

/// Mortar nodal values (arc-ordered) of one parent's nodal trace given in the
/// edge's own ordering.
inline Vector project_to_mortar(const MortarPatch& patch, int side, std::span<const double> edge_nodal) {
  const MortarSide& m = patch.side[side];
  const int n = static_cast<int>(edge_nodal.size());
  Vector u(n);
  for (int k = 0; k < n; ++k) u[k] = m.reversed ? edge_nodal[n - 1 - k] : edge_nodal[k];
  if (m.identity) return u;
  return m.to_mortar * u;
}

/// Mortar flux pipeline for one zone: both states are projected onto each
/// mortar, the numerical flux is taken at the mortar quadrature points with
/// the left normal, projected to the mortar's polynomial space, and returned
/// to each parent edge through s M^-1 S^T (right side with the opposite sign).
/// Writes per-edge flux nodal coefficients [edge slot][var][k] in each edge's
/// own ordering, edges ordered left then right as in the zone.
class MortarFluxWorkspace {
 public:
  MortarFluxWorkspace() = default;
  MortarFluxWorkspace(const Discretization& disc, const InterfaceZone& zone, int n_vars) : n_vars_(n_vars) {
    for (int s = 0; s < 2; ++s) {
      for (int h : zone.side(s)) {
        slot_of_.push_back({h, static_cast<int>(edges_.size())});
        edges_.push_back(h);
        reversed_.push_back(runs_against_arc(disc.mesh(), zone, h));
      }
    }
    coeff_.assign(edges_.size() * n_vars * disc.n1(), 0.0);
    arc_.assign(edges_.size() * n_vars * disc.n1(), 0.0);
  }

  int slot(int edge) const {
    for (const auto& p : slot_of_) {
      if (p[0] == edge) return p[1];
    }
    throw Error(ErrorCode::internal, "edge not in mortar workspace");
  }
  const std::vector<int>& edges() const { return edges_; }
  const std::vector<double>& coeff() const { return coeff_; }
  bool reversed(std::size_t slot) const { return reversed_[slot]; }
  std::vector<double>& coeff() { return coeff_; }
  std::vector<double>& arc_coeff() { return arc_; }
  int n_vars() const { return n_vars_; }

 private:
  int n_vars_ = 0;
  std::vector<int> edges_;
  std::vector<bool> reversed_;
  std::vector<std::array<int, 2>> slot_of_;
  std::vector<double> coeff_;
  std::vector<double> arc_;
};

template <class Model>
void mortar_flux_and_return(const Discretization& disc, const std::vector<MortarPatch>& patches, const Model& model, const TraceData& tr,
                            MortarFluxWorkspace& ws) {
  const int n1 = disc.n1(), Q = disc.nq(), nv = tr.n_vars;
  const Matrix& B = disc.B();
  const Matrix& Minv = disc.mass1_inv();
  const auto& w = disc.quad().weights;
  auto& arc = ws.arc_coeff();
  std::fill(arc.begin(), arc.end(), 0.0);

  std::vector<double> um(static_cast<std::size_t>(Q) * nv), up(um.size()), fq(um.size());
  Vector nodal(n1), tmp(n1), proj(n1);
  std::array<Matrix, 2> states{Matrix(nv, n1), Matrix(nv, n1)};
  Matrix fhat(nv, n1);
  for (const auto& patch : patches) {
    for (int s = 0; s < 2; ++s) {
      const MortarSide& m = patch.side[s];
      for (int v = 0; v < nv; ++v) {
        const double* t = tr.nodal_at(m.edge, v);
        for (int k = 0; k < n1; ++k) nodal[k] = m.reversed ? t[n1 - 1 - k] : t[k];
        if (m.identity) {
          states[s].row(v) = nodal.transpose();
        } else {
          states[s].row(v) = (m.to_mortar * nodal).transpose();
        }
      }
    }
    for (int q = 0; q < Q; ++q) {
      for (int v = 0; v < nv; ++v) {
        double a = 0.0, b = 0.0;
        for (int k = 0; k < n1; ++k) {
          a += B(q, k) * states[0](v, k);
          b += B(q, k) * states[1](v, k);
        }
        um[q * nv + v] = a;
        up[q * nv + v] = b;
      }
    }
    const MortarSide& left = patch.side[0];
    const auto& lg = disc.edge_geometry(left.edge);
    const Vec2 normal = lg.normals[Q / 2];
    const Vec2 e0 = disc.mesh().edge_endpoint(left.edge, left.reversed ? 1 : 0);
    const Vec2 e1 = disc.mesh().edge_endpoint(left.edge, left.reversed ? 0 : 1);
    for (int q = 0; q < Q; ++q) {
      const double xi = left.o + left.s * disc.quad().points[q];
      const Vec2 x = e0 + 0.5 * (1.0 + xi) * (e1 - e0);
      model.numerical_flux(&um[q * nv], &up[q * nv], normal, x, &fq[q * nv]);
    }
    // L2 projection of the pointwise flux onto the mortar space.
    for (int v = 0; v < nv; ++v) {
      for (int k = 0; k < n1; ++k) {
        double a = 0.0;
        for (int q = 0; q < Q; ++q) a += B(q, k) * w[q] * fq[q * nv + v];
        tmp[k] = a;
      }
      fhat.row(v) = (Minv * tmp).transpose();
    }
    for (int s = 0; s < 2; ++s) {
      const MortarSide& m = patch.side[s];
      const double sign = s == 0 ? 1.0 : -1.0;
      double* out = arc.data() + static_cast<std::size_t>(ws.slot(m.edge)) * nv * n1;
      for (int v = 0; v < nv; ++v) {
        if (m.identity) {
          proj = fhat.row(v).transpose();
        } else {
          proj = m.from_mortar * fhat.row(v).transpose();
        }
        for (int k = 0; k < n1; ++k) out[v * n1 + k] += sign * proj[k];
      }
    }
  }
  // Back to each edge's own ordering.
  auto& coeff = ws.coeff();
  const auto& edges = ws.edges();
  for (std::size_t slot = 0; slot < edges.size(); ++slot) {
    const bool rev = ws.reversed(slot);
    const double* a = arc.data() + slot * nv * n1;
    double* c = coeff.data() + slot * nv * n1;
    for (int v = 0; v < nv; ++v) {
      for (int k = 0; k < n1; ++k) c[v * n1 + k] = rev ? a[v * n1 + n1 - 1 - k] : a[v * n1 + k];
    }
  }
}

template <class Model>
class MortarHandler final : public InterfaceHandler<Model> {
 public:
  MortarHandler(const Discretization& disc, int zone, int n_vars)
      : InterfaceHandler<Model>(disc, zone), patches_(build_mortars(disc, this->zone())),
        ws_(disc, this->zone(), n_vars) {}

  std::string_view name() const override { return "mortar"; }
  const std::vector<MortarPatch>& patches() const { return patches_; }
  const MortarFluxWorkspace& workspace() const { return ws_; }

  void compute(const Model& model, TraceData& tr) override {
    mortar_flux_and_return(*this->disc_, patches_, model, tr, ws_);
    const int n1 = tr.n1, nv = tr.n_vars;
    const double* B = this->disc_->B().data();
    const auto& edges = ws_.edges();
    for (std::size_t slot = 0; slot < edges.size(); ++slot) {
      const double* c = ws_.coeff().data() + slot * nv * n1;
      for (int q = 0; q < tr.nq; ++q) {
        double* f = tr.flux_at(edges[slot], q);
        for (int v = 0; v < nv; ++v) {
          double s = 0.0;
          for (int k = 0; k < n1; ++k) s += B[q * n1 + k] * c[v * n1 + k];
          f[v] = s;
        }
      }
    }
    this->measure_defect(tr);
  }

 private:
  std::vector<MortarPatch> patches_;
  MortarFluxWorkspace ws_;
};

template <class Model>
std::unique_ptr<InterfaceHandler<Model>> make_interface_handler(InterfaceMethod method, const Discretization& disc,
                                                                int zone) {
  switch (method) {
    case InterfaceMethod::conformal: return std::make_unique<ConformalNullHandler<Model>>(disc, zone);
    case InterfaceMethod::p2p: return std::make_unique<P2PHandler<Model>>(disc, zone);
    case InterfaceMethod::mortar: return std::make_unique<MortarHandler<Model>>(disc, zone, Model::n_vars);
  }
  throw Error(ErrorCode::invalid_argument, "unknown interface method");
}

}  // namespace ncdg
