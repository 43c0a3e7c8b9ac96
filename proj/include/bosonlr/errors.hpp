#pragma once

#include <stdexcept>
#include <string>

namespace bosonlr {

// Error taxonomy. Each experiment-level failure maps onto a CLI exit code
// (see tools/cli.hpp), so every throw site picks the narrowest type.

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Occupation vector that violates the cap or sector of a basis.
struct NotInBasis : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// Dimension or size guard exceeded (basis size, dense cap, vertex cap).
struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative method failed to converge.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sector partition functions do not decay (z_N / z_{N-1} >= 1).
struct DivergingPartitionFunction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration. `field()` is a dotted path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct FileNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a report has too few points to plot.
struct NothingToPlot : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The lattice is too short to hide boundary reflections at the requested
/// times; rerun on a longer chain.
struct BoundaryContamination : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bosonlr
