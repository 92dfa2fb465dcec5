#pragma once

#include <stdexcept>
#include <string>

namespace eec {

/// Precondition violated by the caller (bad shape, out-of-domain argument).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to reach its target accuracy.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed serialized input (ODE, job or parameter files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear system that cannot be solved at any permitted precision.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eec
