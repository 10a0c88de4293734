#pragma once

#include <stdexcept>
#include <string>

namespace aggbne {

// Error categories map onto the CLI exit codes: config -> 2,
// validation -> 3, numeric -> 4. Argument/shape misuse throws
// std::invalid_argument / std::out_of_range directly.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aggbne
