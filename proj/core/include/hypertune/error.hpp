#pragma once

#include <stdexcept>
#include <string>

namespace hypertune {

/// Hard fault: invalid inputs, broken invariants, unusable state.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A single objective evaluation failed (divergence, empty vocabulary, ...).
/// Optimization loops record these as failed observations and keep going.
class ObjectiveFailure : public Error {
 public:
  explicit ObjectiveFailure(const std::string& what) : Error(what) {}
};

}  // namespace hypertune
