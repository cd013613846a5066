#include "freeprod/error.hpp"

namespace freeprod {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::nonzero_inner_constant: return "NonzeroInnerConstant";
    case ErrorCode::zero_linear_term: return "ZeroLinearTerm";
    case ErrorCode::point_on_support: return "PointOnSupport";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::unbounded_support: return "UnboundedSupport";
    case ErrorCode::continuation_failure: return "ContinuationFailure";
    case ErrorCode::zero_first_moment: return "ZeroFirstMoment";
    case ErrorCode::newton_divergence: return "NewtonDivergence";
    case ErrorCode::edge_singularity: return "EdgeSingularity";
    case ErrorCode::missing_closed_form: return "MissingClosedForm";
    case ErrorCode::non_monotone_s: return "NonMonotoneS";
    case ErrorCode::flat_region: return "FlatRegion";
    case ErrorCode::boundary_point: return "BoundaryPoint";
    case ErrorCode::mask_inconsistency: return "MaskInconsistency";
    case ErrorCode::open_contour: return "OpenContour";
    case ErrorCode::unknown_catalog_entry: return "UnknownCatalogEntry";
    case ErrorCode::backend_failure: return "BackendFailure";
    case ErrorCode::kind_mismatch: return "KindMismatch";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace freeprod
