#pragma once

#include <stdexcept>
#include <string>

namespace randword {

/// Base of every error raised by the library. The CLI maps the three
/// families below onto exit codes 2 (config), 3 (numeric) and 4 (data).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameters, schema violations, violated preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver a trustworthy answer.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The data handed in is degenerate for the requested computation.
class DataError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class BranchPointError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DirichletEigenvalueError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConditioningError : public NumericError {
 public:
  using NumericError::NumericError;
};

class EnlargeBoxError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ModelDegenerateError : public DataError {
 public:
  using DataError::DataError;
};

class WindowError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace randword
