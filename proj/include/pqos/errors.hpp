#pragma once

#include <stdexcept>
#include <string>

namespace pqos {

/// Invalid configuration value or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or incompatible checkpoint file.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pqos
