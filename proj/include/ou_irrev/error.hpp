#pragma once

#include <stdexcept>
#include <string>

namespace ouirr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad call: wrong dimension, negative time, malformed list.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input violates a model invariant (singular Gamma, ragged rows, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iteration failed to converge or a result overflowed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The Kronecker (Lyapunov) system is singular: two eigenvalues of B sum to ~0.
class DegenerateModelError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The model is sweeping; no integrable stationary density exists.
class NoStationaryLawError : public Error {
 public:
  using Error::Error;
};

/// A potential U(x) only exists when A^{-1}B is symmetric positive definite.
class PotentialUndefinedError : public Error {
 public:
  using Error::Error;
};

/// Entropy of a degenerate (point-mass) Gaussian.
class UndefinedEntropyError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ouirr
