#pragma once

#include <stdexcept>
#include <string>

namespace intersafe {

// Error categories surfaced by the CLI as distinct exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ComputationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace intersafe
