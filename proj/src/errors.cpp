#include "fibril/errors.hpp"

namespace fibril {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorKind::NonPositiveDefiniteMetric: return "NonPositiveDefiniteMetric";
    case ErrorKind::ActionNotIsometric: return "ActionNotIsometric";
    case ErrorKind::SingularFaddeevPopov: return "SingularFaddeevPopov";
    case ErrorKind::NonPositiveOrbitMetric: return "NonPositiveOrbitMetric";
    case ErrorKind::ChartExit: return "ChartExit";
    case ErrorKind::SurfaceDrift: return "SurfaceDrift";
    case ErrorKind::MissingIncrements: return "MissingIncrements";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::PathFailureThreshold: return "PathFailureThreshold";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

Error::Error(ErrorKind k, const std::string& msg)
    : std::runtime_error(std::string(error_name(k)) + ": " + msg), kind_(k) {}

void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::Io:
      return kExitConfig;
    case ErrorKind::NonPositiveDefiniteMetric:
    case ErrorKind::ActionNotIsometric:
      return kExitIdentityFailure;
    default:
      return kExitRuntime;
  }
}

}  // namespace fibril
