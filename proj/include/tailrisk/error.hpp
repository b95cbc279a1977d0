#pragma once

#include <stdexcept>
#include <string>

namespace tailrisk {

/// Base class of all errors thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed, inconsistent or insufficient input data.
struct data_error : error {
  using error::error;
};

/// Numerical failure: non-convergence, domain violation, overflow.
struct numeric_error : error {
  using error::error;
};

}  // namespace tailrisk
