#pragma once

#include <stdexcept>
#include <string>

namespace curvest {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or parameter lies outside the domain where a quantity is defined
/// (antipodal points, non-chronological pairs, radii beyond the comparison range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The distance gradient is requested at (or numerically at) the reference point.
class UndefinedGradientError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Induced metric is singular at a chart point.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Tangent plane is not spacelike in a Lorentzian ambient.
class SignatureError : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis (ellipticity, definiteness, positivity) fails at a sample.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// Solver, quadrature or eigen-decomposition failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario configuration or command line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Every grid point was rejected by the frame preconditions.
class EmptySampleError : public Error {
 public:
  using Error::Error;
};

}  // namespace curvest
