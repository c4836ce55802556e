#include "dhym/errors.hpp"

namespace dhym {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonPositiveMetric: return "NonPositiveMetric";
    case ErrorKind::DegeneratePhase: return "DegeneratePhase";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::DegenerateTopPower: return "DegenerateTopPower";
    case ErrorKind::PhasePreconditionViolated: return "PhasePreconditionViolated";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::SingularLinearization: return "SingularLinearization";
    case ErrorKind::SingularElliptic: return "SingularElliptic";
    case ErrorKind::SmallRadiusObstruction: return "SmallRadiusObstruction";
    case ErrorKind::ContinuationStalled: return "ContinuationStalled";
    case ErrorKind::ConvexityLost: return "ConvexityLost";
    case ErrorKind::NonPeriodicCurvature: return "NonPeriodicCurvature";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace dhym
