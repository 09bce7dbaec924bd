#pragma once

#include <stdexcept>
#include <string>

namespace corrgroup {

// Raised when inputs violate a documented precondition (bad parameters,
// malformed files, out-of-range recipe values). The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a well-formed input cannot be processed (degenerate geometry,
// solver failure, missing data required by an algorithm).
class ComputationError : public std::runtime_error {
 public:
  explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace corrgroup
