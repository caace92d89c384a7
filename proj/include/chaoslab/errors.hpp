#pragma once

#include <stdexcept>
#include <string>

namespace chaoslab {

// Raised while parsing or validating an experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a computation hits a numerical obstruction: a singular kernel
// evaluation, a gamma-function pole, a materially indefinite matrix.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an artifact directory lacks the files or columns a plot needs.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chaoslab
