#include "ncdg/models.hpp"

namespace ncdg {
template class DGOperator<AdvectionModel>;
template class DGOperator<EulerModel>;
template class ConformalNullHandler<AdvectionModel>;
template class ConformalNullHandler<EulerModel>;
template class P2PHandler<AdvectionModel>;
template class P2PHandler<EulerModel>;
template class MortarHandler<AdvectionModel>;
template class MortarHandler<EulerModel>;
}  // namespace ncdg
