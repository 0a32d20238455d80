#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperocc {

enum class ErrorCode {
  // configuration
  Config,
  // data / format
  BadMagic,
  UnsupportedVersion,
  Truncated,
  BadLabel,
  BadMask,
  NonFiniteData,
  InvariantViolation,
  EmptySet,
  DimensionMismatch,
  AnomalyInTraining,
  UndefinedAUC,
  // numeric
  ZeroCenter,
  NonFiniteGradient,
  NonFiniteLoss,
  // io
  Io,
};

/// Coarse class of an error, used for process exit codes.
enum class ErrorClass { Config = 2, Data = 3, Numeric = 4, Io = 5 };

std::string_view to_string(ErrorCode code) noexcept;
ErrorClass error_class(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyperocc
