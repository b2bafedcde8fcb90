#pragma once

#include <stdexcept>
#include <string>

namespace adacomp {

/// Invalid user-supplied configuration (maps to CLI exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure during evaluation (maps to CLI exit code 2).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a Gamma-function factor hits one of its poles.
class GammaPoleError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace adacomp
