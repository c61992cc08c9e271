#pragma once

#include <stdexcept>
#include <string>

namespace jointosc {

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or non-finite input data (CLI exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An interval or function does not live on the expected domain.
class DomainMismatch : public DataError {
 public:
  using DataError::DataError;
};

/// An iterative method failed to reach its tolerance (CLI exit code 4).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double last_value = 0.0)
      : std::runtime_error(what), last_value_(last_value) {}
  double last_value() const { return last_value_; }

 private:
  double last_value_;
};

}  // namespace jointosc
