#pragma once

#include <stdexcept>
#include <string>

namespace abma {

/// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad command line or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a schema or invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical routine could not proceed (degenerate input, divergence).
class NumericError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace abma
