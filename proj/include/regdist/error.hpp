#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regdist {

// Every failure the library reports carries one of these codes; the CLI maps
// them onto distinct process exit statuses.
enum class ErrorCode {
  stencil_outside_domain,
  on_target_set,
  empty_set,
  negative_lipschitz,
  empty_grid,
  empty_stratification,
  missing_sup_bound,
  missing_lower_bound,
  certificate_mismatch,
  zero_denominator,
  unbounded_inner,
  on_w,
  eta_too_large,
  recursion_base,
  mixed_reference,
  coverage_gap,
  infeasible_schedule,
  containment_violation,
  support_leak,
  non_positive_f,
  empty_level_set,
  empty_contour,
  unsupported_dimension,
  invalid_argument,
  syntax_error,
  semantic_error,
  io_error,
};

std::string_view error_name(ErrorCode code);

/// Process exit status used by the CLI for a given error class.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace regdist
