#include "hyperocc/error.hpp"

namespace hyperocc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config: return "Config";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::BadMask: return "BadMask";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AnomalyInTraining: return "AnomalyInTraining";
    case ErrorCode::UndefinedAUC: return "UndefinedAUC";
    case ErrorCode::ZeroCenter: return "ZeroCenter";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config:
      return ErrorClass::Config;
    case ErrorCode::ZeroCenter:
    case ErrorCode::NonFiniteGradient:
    case ErrorCode::NonFiniteLoss:
      return ErrorClass::Numeric;
    case ErrorCode::Io:
      return ErrorClass::Io;
    default:
      return ErrorClass::Data;
  }
}

}  // namespace hyperocc
