#include "qrdyn/error.hpp"

namespace qrdyn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingOracle: return "MissingOracle";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::BranchPointSuspected: return "BranchPointSuspected";
    case ErrorCode::AllSamplesRejected: return "AllSamplesRejected";
    case ErrorCode::SearchBoxTooSmall: return "SearchBoxTooSmall";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::DegreeNotAboveDilatation: return "DegreeNotAboveDilatation";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::NotPolynomialType: return "NotPolynomialType";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NoFixedPointFound: return "NoFixedPointFound";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace qrdyn
