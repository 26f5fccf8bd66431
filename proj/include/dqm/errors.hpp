#pragma once

#include <stdexcept>

namespace dqm {

// Bad configuration or input file: maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime failure of a numerical procedure (NaN, node formation, drift):
// maps to CLI exit code 3.
struct NumericalAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dqm
