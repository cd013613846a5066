#ifndef FREEPROD_ERROR_HPP
#define FREEPROD_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace freeprod {

// Failure categories. The CLI maps these onto exit codes.
enum class ErrorCode {
  // series-calculus
  nonzero_inner_constant,
  zero_linear_term,
  // hermitian-freeops
  point_on_support,
  no_convergence,
  unbounded_support,
  continuation_failure,
  zero_first_moment,
  newton_divergence,
  edge_singularity,
  missing_closed_form,
  // isotropic-spectra
  non_monotone_s,
  flat_region,
  // quaternionic-law
  boundary_point,
  mask_inconsistency,
  open_contour,
  unknown_catalog_entry,
  // matrix-lab
  backend_failure,
  kind_mismatch,
  // generic
  invalid_argument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace freeprod

#endif  // FREEPROD_ERROR_HPP
