#pragma once
#include <stdexcept>
#include <string>

namespace rdlab {

// Invalid user-supplied configuration or arguments (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Numerical failure during a computation (CLI exit code 3).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace rdlab
