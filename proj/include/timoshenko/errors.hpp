#pragma once

#include <stdexcept>
#include <string>

namespace timoshenko {

// Root of all library errors. The category maps one-to-one onto the C API
// status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition (bad sizes, zero order, non-positive shift).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside the admissible interval.
class DomainError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Data violating the homogeneous Dirichlet compatibility conditions.
class CompatibilityError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Numerical breakdown: non-positive pivot, failed factorization, step failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature gave up; best_estimate holds the sum it had reached.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : NumericalError(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

/// File system failures; the message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace timoshenko
