#pragma once

#include <stdexcept>
#include <string>

namespace agobf {

/// Malformed input: out-of-range subscores, unknown ids, incompatible
/// assignments. CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters (fractions, budgets, oracle bounds). CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The goal privilege cannot be derived. CLI exit code 3.
class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace agobf
