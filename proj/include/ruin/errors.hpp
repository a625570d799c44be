#pragma once

#include <stdexcept>
#include <string>

namespace ruin {

/// A parameter or argument violates a documented invariant or precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A requested combination of family, delay and evaluation path is not available.
class UnsupportedError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical procedure failed to reach its tolerance (truncation cap hit,
/// non-convergent series, quadrature budget exhausted).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of subdivisions; carries the best value so far.
class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double best_value, double error_estimate)
      : NumericError(what), best_value_(best_value), error_estimate_(error_estimate) {}

  [[nodiscard]] double best_value() const noexcept { return best_value_; }
  [[nodiscard]] double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_value_;
  double error_estimate_;
};

}  // namespace ruin
