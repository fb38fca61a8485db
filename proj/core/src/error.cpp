#include "kinlyap/error.hpp"

namespace kinlyap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVelocityRow: return "ZeroVelocityRow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SteadyStateViolation: return "SteadyStateViolation";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::PositiveEigenvalue: return "PositiveEigenvalue";
    case ErrorCode::DegenerateRank: return "DegenerateRank";
    case ErrorCode::DecompositionResidual: return "DecompositionResidual";
    case ErrorCode::RankZero: return "RankZero";
    case ErrorCode::NonPositiveDamping: return "NonPositiveDamping";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::NotCoplanar: return "NotCoplanar";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::UncertifiedTimeStep: return "UncertifiedTimeStep";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonPositiveNorm: return "NonPositiveNorm";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace kinlyap
