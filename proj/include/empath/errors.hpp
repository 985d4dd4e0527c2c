#pragma once

#include <stdexcept>
#include <string>

namespace empath {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invariant or precondition violation in domain data.
struct ValidationError : Error {
  using Error::Error;
};

/// Malformed file or wire content (names the offending field/line).
struct ParseError : Error {
  using Error::Error;
};

/// Filesystem or socket failure.
struct IoError : Error {
  using Error::Error;
};

/// Input too short or too sparse for the requested computation.
struct InsufficientDataError : ValidationError {
  using ValidationError::ValidationError;
};

/// Dataset unusable for model fitting (e.g. single-class labels).
struct TrainingError : ValidationError {
  using ValidationError::ValidationError;
};

/// Bad engine, fusion, or server configuration value.
struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

/// Message arrived in an illegal session phase or malformed order.
struct ProtocolError : Error {
  using Error::Error;
};

}  // namespace empath
