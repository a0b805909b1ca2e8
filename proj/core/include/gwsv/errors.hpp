#pragma once

#include <stdexcept>

namespace gwsv {

// Positive-definiteness or sparsity-pattern violation in a numeric kernel.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unusable configuration or malformed input data.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gwsv
