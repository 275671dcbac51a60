#pragma once

#include <stdexcept>
#include <string>

namespace ucp {

enum class ErrorKind {
  InvalidInput,
  OutOfRange,
  Solver,
  Certification,
  NonExactness,
  NonInjective,
  Extrapolation,
  Precondition,
  InvalidParameter,
  InvalidMaterial,
  InvalidSupport,
  InvalidTest,
  TraceIdentity,
  Degenerate,
  NotApplicable,
  Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::Solver: return "solver error";
    case ErrorKind::Certification: return "certification failure";
    case ErrorKind::NonExactness: return "non-exactness";
    case ErrorKind::NonInjective: return "non-injectivity";
    case ErrorKind::Extrapolation: return "extrapolation";
    case ErrorKind::Precondition: return "precondition failure";
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::InvalidMaterial: return "invalid material";
    case ErrorKind::InvalidSupport: return "invalid support";
    case ErrorKind::InvalidTest: return "invalid test function";
    case ErrorKind::TraceIdentity: return "trace-identity failure";
    case ErrorKind::Degenerate: return "degenerate input";
    case ErrorKind::NotApplicable: return "not applicable";
    case ErrorKind::Config: return "config error";
  }
  return "error";
}

}  // namespace ucp
