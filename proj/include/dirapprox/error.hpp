#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dirapprox {

enum class ErrorCode {
  InvalidArgument,
  NotTotallyReal,
  Reducible,
  NotSquarefree,
  NotPrime,
  PrecisionExhausted,
  SingularEmbedding,
  StructureViolation,
  TooManyPoints,
  EpsilonTooLarge,
  EpsilonBelowFloor,
  ZeroMass,
  DimensionMismatch,
  UnsupportedDimension,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotTotallyReal: return "NotTotallyReal";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::NotSquarefree: return "NotSquarefree";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::SingularEmbedding: return "SingularEmbedding";
    case ErrorCode::StructureViolation: return "StructureViolation";
    case ErrorCode::TooManyPoints: return "TooManyPoints";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::EpsilonBelowFloor: return "EpsilonBelowFloor";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
  }
  return "Unknown";
}

/// Every library failure carries a code; what() starts with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dirapprox
