#pragma once

#include <stdexcept>
#include <string>

namespace henon {

/// Invalid parameters or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of a numerical procedure on valid input. Maps to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Nehari fibering map showed no sign change on [1e-8, 1e8].
class NoSignChange : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Every multistart collapsed to the trivial point.
class AllStartsDegenerate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Shooting trajectory exceeded the overflow guard.
class BlowUp : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Shooting bisection found no sign change of u(1).
class NoCrossing : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The concentrated test function is not yet below the Nehari manifold (h(1) <= 0).
class EpsilonTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Not enough converged rows for an exponent fit.
class InsufficientData : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace henon
