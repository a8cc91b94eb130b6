#pragma once

#include <stdexcept>
#include <string>

namespace relnav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the domain of a function (e.g. non-positive radius).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested rotation has no bounded MRP (exactly 360 degrees).
class DegenerateRotationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The viewing geometry does not define a visible set (camera inside the body).
class DegeneratePoseError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A matrix that must be inverted or factored is singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed even after diagonal jitter.
class FactorizationError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not meet its tolerance.
class StepSizeUnderflowError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace relnav
