#pragma once

#include <stdexcept>
#include <string>

namespace cradar {

// Invalid or inconsistent configuration; maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Violated runtime assumption (field-of-view exit, beam collision); a run that
// hits one is truncated and reported, not silently patched.
struct SimulationError : std::runtime_error {
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cradar
