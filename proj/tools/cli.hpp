#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bosonlr::cli {

// Process exit codes; the only machine-readable contract of the binary.
enum ExitCode : int {
  kPass = 0,
  kViolation = 1,
  kConfigError = 2,
  kResourceError = 3,
};

/// Parses argv, runs the requested experiments and writes their reports.
/// Never throws; every failure is mapped onto an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Maps the exception currently being handled onto an exit code and prints
/// a one-line message to `err`.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace bosonlr::cli
