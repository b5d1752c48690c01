#pragma once

#include <stdexcept>
#include <string>

namespace chaosdesign {

/// Input violates a documented precondition (non-Hermitian matrix, bad config value).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative numerical routine failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse: mismatched dimensions, mixing elements from different runs, etc.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace chaosdesign
