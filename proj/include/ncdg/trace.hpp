#pragma once

#include <vector>

#include "ncdg/discretization.hpp"

namespace ncdg {

/// Per half-edge trace storage. Nodal traces are [edge][var][k]; the
/// quadrature-point arrays are [edge][q][var] so that one point's state is
/// contiguous for the flux functions.
struct TraceData {
  int n_vars = 0;
  int n1 = 0;
  int nq = 0;
  int n_edges = 0;
  std::vector<double> nodal;
  std::vector<double> interior;
  std::vector<double> exterior;
  std::vector<double> flux;  // numerical normal flux f~ . n

  TraceData() = default;
  TraceData(int edges, int vars, int order, int quad_points)
      : n_vars(vars), n1(order + 1), nq(quad_points), n_edges(edges),
        nodal(static_cast<std::size_t>(edges) * vars * (order + 1)),
        interior(static_cast<std::size_t>(edges) * vars * quad_points),
        exterior(interior.size()),
        flux(interior.size()) {}

  double* nodal_at(int h, int v) { return nodal.data() + (static_cast<std::size_t>(h) * n_vars + v) * n1; }
  const double* nodal_at(int h, int v) const {
    return nodal.data() + (static_cast<std::size_t>(h) * n_vars + v) * n1;
  }
  std::size_t point(int h, int q) const { return (static_cast<std::size_t>(h) * nq + q) * n_vars; }
  double* interior_at(int h, int q) { return interior.data() + point(h, q); }
  const double* interior_at(int h, int q) const { return interior.data() + point(h, q); }
  double* exterior_at(int h, int q) { return exterior.data() + point(h, q); }
  const double* exterior_at(int h, int q) const { return exterior.data() + point(h, q); }
  double* flux_at(int h, int q) { return flux.data() + point(h, q); }
  const double* flux_at(int h, int q) const { return flux.data() + point(h, q); }
};

/// Nodal and quadrature-point interior traces of the four sides of element e.
inline void extract_element_traces(const Discretization& disc, const Field& u, int e, TraceData& tr) {
  const int n1 = disc.n1(), Q = disc.nq(), nv = u.n_vars();
  const double* B = disc.B().data();
  for (int l = 0; l < 4; ++l) {
    const int h = edge_id(e, l);
    for (int v = 0; v < nv; ++v) {
      const double* U = u.data(e, v);
      double* t = tr.nodal_at(h, v);
      for (int k = 0; k < n1; ++k) t[k] = U[disc.edge_node(l, k)];
      for (int q = 0; q < Q; ++q) {
        double s = 0.0;
        for (int k = 0; k < n1; ++k) s += B[q * n1 + k] * t[k];
        tr.interior_at(h, q)[v] = s;
      }
    }
  }
}

inline void extract_traces(const Discretization& disc, const Field& u, TraceData& tr) {
  for (int e = 0; e < u.n_elements(); ++e) extract_element_traces(disc, u, e, tr);
}

}  // namespace ncdg
