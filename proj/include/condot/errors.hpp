#pragma once

#include <stdexcept>
#include <string>

namespace condot {

// Bad inputs: violated preconditions, malformed configs, schema errors.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Runtime numerical failures: infeasible programs, non-convergence where
// convergence is required, NaN losses.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace condot
