#pragma once

#include <stdexcept>
#include <string>

namespace vort {

// Bad user input (config files, CLI). Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain (t <= 0, nonzero mean, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A declared invariant failed at runtime. Maps to exit code 1.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Time integration left the representable regime (NaN, blow-up).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature cannot meet its resolution contract; carries the grid size
// that would be required.
struct QuadratureError : DomainError {
  QuadratureError(const std::string& msg, int required)
      : DomainError(msg), required_grid(required) {}
  int required_grid;
};

}  // namespace vort
