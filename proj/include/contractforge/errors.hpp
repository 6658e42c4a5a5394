#pragma once

#include <stdexcept>
#include <string>

namespace contractforge {

/// An argument lies outside the domain of the function being evaluated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative solver (root finding, inversion) failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A contract or run configuration is inconsistent or incomplete.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter is outside the range in which an analytic result applies.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Derivative or quadrature evaluation produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace contractforge
