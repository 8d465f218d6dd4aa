#pragma once

#include <stdexcept>
#include <string>

namespace desync {

/// Input or parameter rejected before any computation ran.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while running a computation or touching the filesystem.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace desync
