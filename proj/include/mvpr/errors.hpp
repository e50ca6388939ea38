#pragma once

#include <stdexcept>
#include <string>

namespace mvpr {

// Base for all library failures that the CLI maps to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input data (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// Inconsistent hyperparameters, sweep settings or run configuration (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A cached sufficient statistic or allocation disagrees with its definition (exit code 3).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace mvpr
