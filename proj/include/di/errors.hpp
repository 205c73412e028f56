#pragma once

#include <stdexcept>
#include <string>

namespace di {

// Invalid user-supplied configuration or arguments (bad flags, bad files,
// out-of-range labels). Surfaces as exit code 2 / DI_ERROR_CONFIG.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Contract violation detected while running (shape mismatch, non-finite
// values, diverged training). Surfaces as exit code 3 / DI_ERROR_RUNTIME.
class ShapeError : public std::runtime_error {
public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace di
