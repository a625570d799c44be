#pragma once

#include <cmath>
#include <vector>

namespace ruin {

/// A real number stored as sign * exp(log_abs). Zero is sign == 0.
struct SignedLog {
  double log_abs = -INFINITY;
  int sign = 0;

  [[nodiscard]] double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// mantissa * exp(log_scale); lets hypergeometric sums exceed the double range.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  [[nodiscard]] double value() const noexcept { return mantissa * std::exp(log_scale); }
  /// log |value|
  [[nodiscard]] double log_abs() const noexcept { return std::log(std::abs(mantissa)) + log_scale; }
};

/// Parameters of pFq(b_1..b_p; c_1..c_q; z).
struct HypergeometricSpec {
  std::vector<double> numerator;
  std::vector<double> denominator;
  double argument = 0.0;
};

inline constexpr int kHypergeometricMaxTerms = 100'000;

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Rising factorial (a)_n = a (a+1) ... (a+n-1), evaluated as a direct product.
double pochhammer(double a, int n);

/// (a)_n in sign/log-magnitude form, usable when the product overflows.
SignedLog log_pochhammer(double a, int n);

/// ln C(m, r).
double log_binomial(int m, int r);

/// Sums the hypergeometric series by term-ratio recursion. The sum is carried
/// with a running power-of-two rescale, so values far beyond DBL_MAX are fine.
/// Stops once the geometric tail bound term*r/(1-r) of a monotonically
/// decreasing ratio r < 1 drops below tol * max(1, |partial sum|).
/// Requires p <= q, z >= 0 and no denominator parameter in {0, -1, -2, ...}.
ScaledValue pfq_scaled(const HypergeometricSpec& spec, double tol, int max_terms = kHypergeometricMaxTerms);

double pfq(const HypergeometricSpec& spec, double tol);

/// Kummer's confluent function 1F1(a; b; z), z >= 0.
ScaledValue kummer_1f1_scaled(double a, double b, double z, double tol);
double kummer_1f1(double a, double b, double z, double tol);

/// Modified Bessel function I_v(z) of integer order from its own power series.
double bessel_i(int v, double z);

/// Streaming log-sum-exp for positive terms given by their logs.
class LogSum {
 public:
  void add(double log_term) noexcept;
  [[nodiscard]] double log() const noexcept;
  [[nodiscard]] double value() const noexcept { return std::exp(log()); }

 private:
  double max_ = -INFINITY;
  double scaled_ = 0.0;
};

}  // namespace ruin
