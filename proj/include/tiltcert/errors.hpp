#pragma once

#include <stdexcept>
#include <string>

namespace tiltcert {

enum class ErrorCode {
  NumericalFailure,
  NonCommuting,
  DimensionMismatch,
  NotComplementary,
  NotCritical,
  NotPsd,
  ParseError,
  UnsupportedFeature,
  InfeasiblePoint,
  BudgetExceeded,
  NotStationary,
  HessianNotPsd,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tiltcert
