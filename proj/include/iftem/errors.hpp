#pragma once

#include <stdexcept>
#include <string>

namespace iftem {

/// Bad user-supplied configuration or arguments (CLI exit code 1).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A mathematical precondition of an operation is violated (CLI exit code 2).
struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& msg)
      : std::runtime_error(msg) {}
};

/// Numerical failure during computation (CLI exit code 2).
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace iftem
