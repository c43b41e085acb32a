#pragma once

#include <stdexcept>
#include <string>

namespace algpois {

enum class ErrorCode {
  NotClosed,
  DependentBasis,
  DimensionMismatch,
  NotInSpan,
  OutOfDomain,
  SingularJacobian,
  UnknownAction,
  UnknownAlgebra,
  UnsupportedShape,
  AlgebraMismatch,
  DomainExit,
  NonFinite,
  NotInvariant,
  NotFreeRegular,
  NotInvertible,
  GridMismatch,
  DegeneratePairing,
  DepthExceeded,
  ParseError,
  ConfigError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace algpois
