#pragma once

#include <stdexcept>
#include <string>

namespace mocap {

// Bad inputs: malformed files, violated preconditions, degenerate data.
// The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown inside the filter (Cholesky failure after the jitter
// ladder is exhausted). The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mocap
