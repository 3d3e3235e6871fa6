#pragma once

#include <stdexcept>
#include <string>

namespace icmt {

// Raised for malformed input files, broken invariants, and bad configuration.
// The CLI maps this to exit code 1.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a completion or embedding backend fails after retries.
// The CLI maps this to exit code 2.
struct BackendError : std::runtime_error {
  explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace icmt
