#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qrdyn {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  MissingOracle,
  DegreeOverflow,
  BranchPointSuspected,
  AllSamplesRejected,
  SearchBoxTooSmall,
  RadiusTooLarge,
  DegreeNotAboveDilatation,
  ValidationFailed,
  NotPolynomialType,
  BoxTooSmall,
  NotApplicable,
  NoFixedPointFound,
  GridMismatch,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code; the
// CLI and the report writer surface the code name verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qrdyn
