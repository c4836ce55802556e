#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dhym {

/// Failure classes raised by the library. The CLI maps each class onto an
/// exit code, see `exit_code_for`.
enum class ErrorKind {
  InvalidConfig,
  DimensionMismatch,
  NonPositiveMetric,
  DegeneratePhase,
  DegenerateDenominator,
  DegenerateTopPower,
  PhasePreconditionViolated,
  NotConvex,
  NotMonotone,
  SingularLinearization,
  SingularElliptic,
  SmallRadiusObstruction,
  ContinuationStalled,
  ConvexityLost,
  NonPeriodicCurvature,
  InvariantViolation,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace dhym
