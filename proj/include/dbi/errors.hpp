#pragma once

#include <stdexcept>

namespace dbi {

/// File / stream problems (missing file, malformed header, short read).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failures (solver non-convergence, infeasible density target).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter violations use std::invalid_argument throughout.

} // namespace dbi
