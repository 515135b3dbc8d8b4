#pragma once

#include <stdexcept>
#include <string>

namespace bubble {

/// Bad input: a violated precondition or a malformed configuration value.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical invariant does not hold (spectral containment, boundary tails,
/// vanishing integrals, tolerance failures).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bubble
