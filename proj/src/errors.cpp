#include "algpois/errors.hpp"

namespace algpois {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::DependentBasis: return "DependentBasis";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotInSpan: return "NotInSpan";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::UnknownAlgebra: return "UnknownAlgebra";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::DomainExit: return "DomainExit";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::NotFreeRegular: return "NotFreeRegular";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegeneratePairing: return "DegeneratePairing";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace algpois
