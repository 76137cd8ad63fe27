#include "regdist/error.hpp"

namespace regdist {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::stencil_outside_domain: return "StencilOutsideDomain";
    case ErrorCode::on_target_set: return "OnTargetSet";
    case ErrorCode::empty_set: return "EmptySet";
    case ErrorCode::negative_lipschitz: return "NegativeLipschitz";
    case ErrorCode::empty_grid: return "EmptyGrid";
    case ErrorCode::empty_stratification: return "EmptyStratification";
    case ErrorCode::missing_sup_bound: return "MissingSupBound";
    case ErrorCode::missing_lower_bound: return "MissingLowerBound";
    case ErrorCode::certificate_mismatch: return "CertificateMismatch";
    case ErrorCode::zero_denominator: return "ZeroDenominatorDetected";
    case ErrorCode::unbounded_inner: return "UnboundedInner";
    case ErrorCode::on_w: return "OnW";
    case ErrorCode::eta_too_large: return "EtaTooLarge";
    case ErrorCode::recursion_base: return "RecursionBase";
    case ErrorCode::mixed_reference: return "MixedReference";
    case ErrorCode::coverage_gap: return "CoverageGap";
    case ErrorCode::infeasible_schedule: return "InfeasibleSchedule";
    case ErrorCode::containment_violation: return "ContainmentViolation";
    case ErrorCode::support_leak: return "SupportLeak";
    case ErrorCode::non_positive_f: return "NonPositiveF";
    case ErrorCode::empty_level_set: return "EmptyLevelSet";
    case ErrorCode::empty_contour: return "EmptyContour";
    case ErrorCode::unsupported_dimension: return "UnsupportedDimension";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::syntax_error: return "SyntaxError";
    case ErrorCode::semantic_error: return "SemanticError";
    case ErrorCode::io_error: return "IOError";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  // 0 = all verdicts pass, 1 = some verdict failed, 2 = usage error.
  switch (code) {
    case ErrorCode::syntax_error: return 3;
    case ErrorCode::semantic_error: return 4;
    case ErrorCode::io_error: return 5;
    case ErrorCode::coverage_gap: return 20;
    case ErrorCode::infeasible_schedule: return 21;
    case ErrorCode::containment_violation: return 22;
    case ErrorCode::support_leak: return 23;
    case ErrorCode::empty_level_set: return 24;
    case ErrorCode::empty_contour: return 25;
    case ErrorCode::non_positive_f: return 26;
    case ErrorCode::eta_too_large: return 27;
    case ErrorCode::stencil_outside_domain: return 28;
    default: return 10;
  }
}

}  // namespace regdist
