#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace medial {

enum class ErrorCode {
  InvalidValue,
  DuplicatePoint,
  DegenerateCrossRatio,
  InvalidPencil,
  NotTransverse,
  OutOfRange,
  NotAllowable,
  Incompatible,
  DegenerateSheet,
  InvalidConfig,
  DegenerateTriple,
  PinnedDegenerate,
  ExcludedLocus,
  NotImmersion,
  ProjectionSingular,
  PointNotOnTarget,
  BasisMismatch,
  RadialLineNotPreserved,
  SchemaError,
  InvariantViolation,
  NotSimple,
  TooFewPoints,
  NotABranch,
  InsufficientPolylinePoints,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::DegenerateCrossRatio: return "DegenerateCrossRatio";
    case ErrorCode::InvalidPencil: return "InvalidPencil";
    case ErrorCode::NotTransverse: return "NotTransverse";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotAllowable: return "NotAllowable";
    case ErrorCode::Incompatible: return "Incompatible";
    case ErrorCode::DegenerateSheet: return "DegenerateSheet";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateTriple: return "DegenerateTriple";
    case ErrorCode::PinnedDegenerate: return "PinnedDegenerate";
    case ErrorCode::ExcludedLocus: return "ExcludedLocus";
    case ErrorCode::NotImmersion: return "NotImmersion";
    case ErrorCode::ProjectionSingular: return "ProjectionSingular";
    case ErrorCode::PointNotOnTarget: return "PointNotOnTarget";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::RadialLineNotPreserved: return "RadialLineNotPreserved";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NotSimple: return "NotSimple";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NotABranch: return "NotABranch";
    case ErrorCode::InsufficientPolylinePoints: return "InsufficientPolylinePoints";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; `code()` names
/// the failure class so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace medial
