#pragma once

#include <stdexcept>
#include <string>

namespace rotorwave {

// invalid configuration or arguments; CLI exit code 2
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// numerical tolerance violated (norm drift, non-convergence); CLI exit code 3
struct NumericalAbort : std::runtime_error {
  explicit NumericalAbort(const std::string& msg) : std::runtime_error(msg) {}
};

// resource guard tripped (state-count, Jmax ceiling, basis leakage); CLI exit code 4
struct GuardExceeded : std::runtime_error {
  explicit GuardExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rotorwave
