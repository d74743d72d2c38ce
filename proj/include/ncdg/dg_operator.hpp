#pragma once

// Semi-discrete DG operator: du/dt = M^-1 (volume term - surface lift).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <vector>

#include "ncdg/discretization.hpp"
#include "ncdg/interface.hpp"
#include "ncdg/parallel.hpp"
#include "ncdg/trace.hpp"

namespace ncdg {

/// Accumulated wall time per phase, seconds.
struct PhaseTimings {
  double setup = 0.0;
  double volume = 0.0;
  double surface = 0.0;
  double interface = 0.0;
  double integration = 0.0;
  long steps = 0;
  long rhs_evaluations = 0;

  double per_step() const { return steps > 0 ? (volume + surface + interface + integration) / steps : 0.0; }
};

namespace detail {

class ScopedTimer {
 public:
  explicit ScopedTimer(double& sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

template <class Model>
concept HasFarField = requires(const Model& m, double* q) { m.exterior_far_field(q); };

}  // namespace detail

template <class Model>
class DGOperator {
 public:
  DGOperator(const Mesh& mesh, int order, int quad_points, Model model,
             InterfaceMethod method = InterfaceMethod::conformal, int threads = 1)
      : model_(std::move(model)), method_(method), threads_(std::max(1, threads)) {
    detail::ScopedTimer timer(timings_.setup);
    disc_ = std::make_unique<Discretization>(mesh, order, quad_points);
    traces_ = TraceData(mesh.num_half_edges(), Model::n_vars, order, quad_points);
    for (int h = 0; h < mesh.num_half_edges(); ++h) {
      const EdgeLink& l = mesh.link(h);
      switch (l.kind) {
        case LinkKind::conformal:
        case LinkKind::periodic:
          if (h < l.partner) paired_.push_back(h);
          break;
        case LinkKind::dirichlet_zero:
        case LinkKind::far_field:
          if (l.kind == LinkKind::far_field && !detail::HasFarField<Model>) {
            throw Error(ErrorCode::invalid_argument, "model has no far-field state");
          }
          boundary_.push_back(h);
          break;
        case LinkKind::interface:
          break;
      }
    }
    for (int z = 0; z < static_cast<int>(mesh.zones().size()); ++z) {
      handlers_.push_back(make_interface_handler<Model>(method, *disc_, z));
    }
  }

  const Discretization& disc() const { return *disc_; }
  const Mesh& mesh() const { return disc_->mesh(); }
  const Model& model() const { return model_; }
  InterfaceMethod method() const { return method_; }
  int threads() const { return threads_; }
  Field make_field() const { return Field(mesh().num_elements(), Model::n_vars, disc_->order()); }

  const TraceData& traces() const { return traces_; }
  std::vector<std::unique_ptr<InterfaceHandler<Model>>>& handlers() { return handlers_; }
  const std::vector<std::unique_ptr<InterfaceHandler<Model>>>& handlers() const { return handlers_; }

  PhaseTimings& timings() { return timings_; }
  const PhaseTimings& timings() const { return timings_; }

  /// Largest |conservation defect| over all zones and variables since the
  /// last reset.
  double max_defect() const { return max_defect_; }
  void reset_defect() { max_defect_ = 0.0; }

  void rhs(const Field& u, double /*t*/, Field& dudt) {
    const int nv = Model::n_vars;
    if (!dudt.same_shape(u)) dudt = Field(u.n_elements(), u.n_vars(), u.order());
    ++timings_.rhs_evaluations;
    {
      detail::ScopedTimer timer(timings_.surface);
      parallel_for(u.n_elements(), threads_, [&](int begin, int end) {
        for (int e = begin; e < end; ++e) extract_element_traces(*disc_, u, e, traces_);
      });
      edge_fluxes();
    }
    {
      detail::ScopedTimer timer(timings_.interface);
      for (auto& h : handlers_) {
        h->compute(model_, traces_);
        max_defect_ = std::max(max_defect_, h->max_abs_defect());
      }
    }
    {
      detail::ScopedTimer timer(timings_.volume);
      parallel_for(u.n_elements(), threads_, [&](int begin, int end) {
        Scratch s(*disc_, nv);
        for (int e = begin; e < end; ++e) volume_term(u, e, dudt, s);
      });
    }
    {
      detail::ScopedTimer timer(timings_.surface);
      parallel_for(u.n_elements(), threads_, [&](int begin, int end) {
        std::vector<double> work(static_cast<std::size_t>(disc_->n1()) * disc_->n1());
        for (int e = begin; e < end; ++e) {
          surface_lift(e, dudt);
          for (int v = 0; v < nv; ++v) disc_->apply_mass_inverse(e, dudt.data(e, v), work.data());
        }
      });
    }
  }

 private:
  struct Scratch {
    Matrix T, H1, H2;
    std::vector<double> Uq, G1, G2;
    Scratch(const Discretization& d, int nv)
        : T(d.nq(), d.n1()), H1(d.nq(), d.n1()), H2(d.nq(), d.n1()) {
      const std::size_t QQ = static_cast<std::size_t>(d.nq()) * d.nq();
      Uq.resize(nv * QQ);
      G1.resize(nv * QQ);
      G2.resize(nv * QQ);
    }
  };

  void edge_fluxes() {
    const int Q = traces_.nq, nv = Model::n_vars;
    const Mesh& m = mesh();
    for (int h : paired_) {
      const int p = m.link(h).partner;
      const auto& g = disc_->edge_geometry(h);
      for (int q = 0; q < Q; ++q) {
        const int qp = Q - 1 - q;
        const double* um = traces_.interior_at(h, q);
        const double* up = traces_.interior_at(p, qp);
        std::copy(up, up + nv, traces_.exterior_at(h, q));
        std::copy(um, um + nv, traces_.exterior_at(p, qp));
        double* f = traces_.flux_at(h, q);
        model_.numerical_flux(um, up, g.normals[q], g.points[q], f);
        double* fp = traces_.flux_at(p, qp);
        for (int v = 0; v < nv; ++v) fp[v] = -f[v];
      }
    }
    for (int h : boundary_) {
      const bool far = m.link(h).kind == LinkKind::far_field;
      const auto& g = disc_->edge_geometry(h);
      for (int q = 0; q < Q; ++q) {
        double* up = traces_.exterior_at(h, q);
        if (far) {
          if constexpr (detail::HasFarField<Model>) model_.exterior_far_field(up);
        } else {
          std::fill(up, up + nv, 0.0);
        }
        model_.numerical_flux(traces_.interior_at(h, q), up, g.normals[q], g.points[q], traces_.flux_at(h, q));
      }
    }
  }

  // Sum-factorized: U at the quadrature grid is B U B^T, and the weak
  // divergence returns as B^T G1 D + D^T G2 B with G the pre-weighted
  // contravariant fluxes.
  void volume_term(const Field& u, int e, Field& out, Scratch& s) const {
    using MatMap = Eigen::Map<Matrix>;
    using ConstMatMap = Eigen::Map<const Matrix>;
    const int n1 = disc_->n1(), Q = disc_->nq(), nv = Model::n_vars;
    const int QQ = Q * Q;
    const Matrix& B = disc_->B();
    const Matrix& D = disc_->D();
    const ElementGeometry& g = disc_->element_geometry(e);

    for (int v = 0; v < nv; ++v) {
      s.T.noalias() = B * ConstMatMap(u.data(e, v), n1, n1);
      MatMap(s.Uq.data() + v * QQ, Q, Q).noalias() = s.T * B.transpose();
    }

    double q[Model::n_vars], fx[Model::n_vars], fy[Model::n_vars];
    for (int k = 0; k < QQ; ++k) {
      for (int v = 0; v < nv; ++v) q[v] = s.Uq[v * QQ + k];
      model_.flux(q, Vec2{g.x[k], g.y[k]}, fx, fy);
      for (int v = 0; v < nv; ++v) {
        s.G1[v * QQ + k] = g.m00[k] * fx[v] + g.m01[k] * fy[v];
        s.G2[v * QQ + k] = g.m10[k] * fx[v] + g.m11[k] * fy[v];
      }
    }

    for (int v = 0; v < nv; ++v) {
      s.H1.noalias() = ConstMatMap(s.G1.data() + v * QQ, Q, Q) * D;
      s.H2.noalias() = ConstMatMap(s.G2.data() + v * QQ, Q, Q) * B;
      MatMap R(out.data(e, v), n1, n1);
      R.noalias() = B.transpose() * s.H1;
      R.noalias() += D.transpose() * s.H2;
    }
  }

  void surface_lift(int e, Field& out) const {
    const int n1 = disc_->n1(), Q = disc_->nq(), nv = Model::n_vars;
    const double* B = disc_->B().data();
    for (int l = 0; l < 4; ++l) {
      const int h = edge_id(e, l);
      const auto& wj = disc_->edge_geometry(h).weight_jac;
      for (int v = 0; v < nv; ++v) {
        double* R = out.data(e, v);
        for (int k = 0; k < n1; ++k) {
          double acc = 0.0;
          for (int q = 0; q < Q; ++q) acc += B[q * n1 + k] * wj[q] * traces_.flux_at(h, q)[v];
          R[disc_->edge_node(l, k)] -= acc;
        }
      }
    }
  }

  Model model_;
  InterfaceMethod method_;
  int threads_;
  std::unique_ptr<Discretization> disc_;
  TraceData traces_;
  std::vector<int> paired_;
  std::vector<int> boundary_;
  std::vector<std::unique_ptr<InterfaceHandler<Model>>> handlers_;
  PhaseTimings timings_;
  double max_defect_ = 0.0;
};

}  // namespace ncdg
