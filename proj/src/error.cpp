#include "ciliaflow/error.hpp"

namespace ciliaflow {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::coincident_beads: return "CoincidentBeads";
    case ErrorCode::separation_too_small: return "SeparationTooSmall";
    case ErrorCode::negative_height: return "NegativeHeight";
    case ErrorCode::numerical_blowup: return "NumericalBlowup";
    case ErrorCode::empty_trajectory: return "EmptyTrajectory";
    case ErrorCode::division_by_zero: return "DivisionByZero";
    case ErrorCode::line_search_failure: return "LineSearchFailure";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::validation_error: return "ValidationError";
    case ErrorCode::io_error: return "IOError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::coincident_beads:
    case ErrorCode::separation_too_small:
    case ErrorCode::negative_height:
    case ErrorCode::numerical_blowup:
    case ErrorCode::empty_trajectory:
    case ErrorCode::division_by_zero:
    case ErrorCode::line_search_failure:
      return true;
    default:
      return false;
  }
}

}  // namespace ciliaflow
