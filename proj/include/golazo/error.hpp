#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace golazo {

enum class ErrorCode {
  NotPositiveDefinite,
  DimensionTooSmall,
  DimensionMismatch,
  InvalidBounds,
  NegativePenalty,
  NonpositiveDiagonal,
  BoundsNotStrict,
  DegenerateCorrelation,
  InfeasibleBounds,
  NotUnitDiagonal,
  NoFeasibleStart,
  MaxIterationsExceeded,
  MaxSweepsExceeded,
  MdeStep1Failed,
  AllFitsFailed,
  NegativeLoadingInPositiveMode,
  GenerationFailed,
  InvalidGraph,
  InvalidConfig,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::NegativePenalty: return "NegativePenalty";
    case ErrorCode::NonpositiveDiagonal: return "NonpositiveDiagonal";
    case ErrorCode::BoundsNotStrict: return "BoundsNotStrict";
    case ErrorCode::DegenerateCorrelation: return "DegenerateCorrelation";
    case ErrorCode::InfeasibleBounds: return "InfeasibleBounds";
    case ErrorCode::NotUnitDiagonal: return "NotUnitDiagonal";
    case ErrorCode::NoFeasibleStart: return "NoFeasibleStart";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::MaxSweepsExceeded: return "MaxSweepsExceeded";
    case ErrorCode::MdeStep1Failed: return "MdeStep1Failed";
    case ErrorCode::AllFitsFailed: return "AllFitsFailed";
    case ErrorCode::NegativeLoadingInPositiveMode: return "NegativeLoadingInPositiveMode";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace golazo
