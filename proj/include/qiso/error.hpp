#pragma once

#include <stdexcept>
#include <string>

namespace qiso {

/// Violated precondition on an operation's inputs (bad grid, bad parameters, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method (bisection bracket, inverse iteration, ODE step control)
/// failed to reach its target.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qiso
