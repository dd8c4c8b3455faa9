#pragma once

#include <stdexcept>
#include <string>

namespace subheat {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Valid input for which no result is implemented (e.g. a regime/domain pair
/// without a known limit).
class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text (spec strings, flags, config files).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sampler exceeded its step budget without reaching its target level.
class RunawaySampler : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subheat
