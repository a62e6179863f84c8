#pragma once

#include <iosfwd>

namespace finvert::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericalFailure = 3,
  kNotInvertible = 4,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace finvert::cli
