#pragma once

#include <stdexcept>
#include <string>

namespace eulerlab {

/// Input outside the admissible state space (vacuum, non-positive temperature,
/// field leaving the declared convex set, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computed quantity overflowed the representable range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// A length scale is below what the grid can resolve.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: empty sets, mismatched grids, bad configuration.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The time integrator lost stability or hit vacuum mid-run.
class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eulerlab
