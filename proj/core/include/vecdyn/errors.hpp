#pragma once

#include <stdexcept>
#include <string>

namespace vecdyn {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input vector/matrix shapes do not match the model.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid model description (cycles, duplicate names, bad inertials, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Lookup of a frame name that does not exist in the model.
class UnknownFrameError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Text-level parse failure. Positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(message + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line(line),
        column(column) {}

  int line;
  int column;
};

/// Input uses a feature that is deliberately out of scope (e.g. planar joints).
class UnsupportedFeatureError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a structure the model does not have (e.g. a serial chain).
class UnsupportedStructureError : public Error {
 public:
  using Error::Error;
};

/// Mass matrix factorization failed; the model has a singular inertia.
class SingularInertiaError : public Error {
 public:
  using Error::Error;
};

}  // namespace vecdyn
