#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levelset {

// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (odd dimension, non-positive sizes, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Structured file with a missing or unsupported schema_version.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Structured file whose arrays disagree with the declared dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input data that admits no meaningful answer (constant responses,
// collinear samples, zero-norm Jacobian columns).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Non-finite value encountered during a numerical computation.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::ptrdiff_t block = -1)
      : Error(what), block_(block) {}

  // Index of the RevNet block holding the offending value, or -1.
  std::ptrdiff_t block() const noexcept { return block_; }

 private:
  std::ptrdiff_t block_;
};

}  // namespace levelset
