#pragma once
#include <stdexcept>
#include <string>

namespace rdlab {

// Bad user-facing configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure while running (CLI exit code 3): non-positive diffusivity on
// a path, factorization breakdown, solver non-convergence, and the like.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rdlab
