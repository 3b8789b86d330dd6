#pragma once

#include <stdexcept>

namespace ssam {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration supplied by the caller.
struct UsageError : Error {
  using Error::Error;
};

/// Malformed, inconsistent, or degenerate input data.
struct DataError : Error {
  using Error::Error;
};

/// Tensor shape disagreement.
struct ShapeError : Error {
  using Error::Error;
};

/// Non-finite values reached a place that requires finite ones.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace ssam
