#pragma once

#include <stdexcept>
#include <string>

namespace scc {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied values: bad polygons, non-positive parameters,
/// malformed configuration.
struct InvalidArgument : Error {
  using Error::Error;
};

/// Numerical failures: non-PD mass matrix, singular solves, step-size
/// underflow, non-finite derivatives.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace scc
