#pragma once

#include <stdexcept>
#include <string>

namespace acstab {

// Bad inputs: topology/potential/config values that fail validation.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime numerics: Herglotz violations, singular pivots, solver failures.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace acstab
