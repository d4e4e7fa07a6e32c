#pragma once

#include <stdexcept>
#include <string>

namespace photonwalk {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric argument is outside its allowed domain (c0 <= 0, mu > 1, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A lattice geometry is malformed (duplicate positions, bad grid shape).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// An input object violates a structural invariant (non-Hermitian coupling
// matrix, unnormalized correlation matrix, disconnected constraint graph).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Internal numerical consistency failure (negativity beyond tolerance,
// solver breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration does not match the schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace photonwalk
