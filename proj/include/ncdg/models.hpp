#pragma once

// The operator and interface handlers for the two shipped models. Builds that
// define NCDG_PRECOMPILED_MODELS (target ncdg::models) take these from
// src/models.cpp instead of instantiating them in every translation unit.

#include "ncdg/dg_operator.hpp"
#include "ncdg/interface.hpp"
#include "ncdg/physics/advection.hpp"
#include "ncdg/physics/riemann.hpp"

#ifdef NCDG_PRECOMPILED_MODELS
namespace ncdg {
extern template class DGOperator<AdvectionModel>;
extern template class DGOperator<EulerModel>;
extern template class ConformalNullHandler<AdvectionModel>;
extern template class ConformalNullHandler<EulerModel>;
extern template class P2PHandler<AdvectionModel>;
extern template class P2PHandler<EulerModel>;
extern template class MortarHandler<AdvectionModel>;
extern template class MortarHandler<EulerModel>;
}  // namespace ncdg
#endif
