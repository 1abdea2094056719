#pragma once

#include <stdexcept>
#include <string>

namespace fibril {

enum class ErrorKind {
  NonPositiveDefinite,
  NonPositiveDefiniteMetric,
  ActionNotIsometric,
  SingularFaddeevPopov,
  NonPositiveOrbitMetric,
  ChartExit,
  SurfaceDrift,
  MissingIncrements,
  InsufficientSamples,
  PathFailureThreshold,
  Config,
  Io,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind k, const std::string& msg);

// Process exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitIdentityFailure = 1,
  kExitConfig = 2,
  kExitRuntime = 3,
};

int exit_code_for(ErrorKind k);

}  // namespace fibril
