#pragma once

#include <stdexcept>
#include <string>

namespace graspeeg {

// Base for all library errors. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: missing files, malformed records, shape mismatches,
// windows outside an epoch.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: singular matrices, non-convergence, unstable filters.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace graspeeg
