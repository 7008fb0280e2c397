#include "saddle/error.hpp"

namespace saddle {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotMorse: return "NotMorse";
    case ErrorCode::NoNegativeEigenvalue: return "NoNegativeEigenvalue";
    case ErrorCode::SingleGroup: return "SingleGroup";
    case ErrorCode::WrongRadius: return "WrongRadius";
    case ErrorCode::NotStrictSaddle: return "NotStrictSaddle";
    case ErrorCode::NotStrictSaddleAtZero: return "NotStrictSaddleAtZero";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NoExit: return "NoExit";
    case ErrorCode::DegeneracyUnhandled: return "DegeneracyUnhandled";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::ZeroGap: return "ZeroGap";
    case ErrorCode::NoExitInFamily: return "NoExitInFamily";
    case ErrorCode::NoLinearExit: return "NoLinearExit";
    case ErrorCode::VacuousBound: return "VacuousBound";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace saddle
