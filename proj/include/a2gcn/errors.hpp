#pragma once

#include <stdexcept>
#include <string>

namespace a2gcn {

// Raised for malformed/inconsistent input data and file problems.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a numeric invariant breaks (shape mismatch, NaN, divergence).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace a2gcn
