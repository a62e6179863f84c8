#pragma once

#include <stdexcept>
#include <string>

namespace finvert {

enum class ErrorCode {
  InvalidInput,      // malformed arguments or violated preconditions
  ShapeMismatch,
  InsufficientData,  // signal or image too short for the requested operation
  Parse,             // unreadable file contents
  NotInvertible,
  UseKernelPath,     // pseudo-inverse requested for |p| >= 2
  TrivialKernel,     // kernel requested for an invertible factor
  NotSeparable,
  DegenerateBasis,
  ConvergenceFailure,
};

const char* to_string(ErrorCode code) noexcept;

/// All library failures are reported through this exception type; the code
/// lets callers (notably the CLI) map a failure to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace finvert
