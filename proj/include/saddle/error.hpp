#pragma once

#include <stdexcept>
#include <string>

namespace saddle {

enum class ErrorCode {
  NotSymmetric,
  NotMorse,
  NoNegativeEigenvalue,
  SingleGroup,
  WrongRadius,
  NotStrictSaddle,
  NotStrictSaddleAtZero,
  StepTooLarge,
  NoExit,
  DegeneracyUnhandled,
  InvalidAlpha,
  ZeroGap,
  NoExitInFamily,
  NoLinearExit,
  VacuousBound,
  OutOfDomain,
  ConfigError,
  IoError,
  PreconditionViolation,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace saddle
