#include "ruin/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "ruin/errors.hpp"

namespace ruin {

namespace {

constexpr int kRescaleExponent = 600;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
  if (std::isinf(x)) return x;
  return boost::math::lgamma(x);
}

double pochhammer(double a, int n) {
  if (n < 0) throw DomainError("pochhammer requires n >= 0");
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= a + k;
  return r;
}

SignedLog log_pochhammer(double a, int n) {
  if (n < 0) throw DomainError("pochhammer requires n >= 0");
  if (n == 0) return {0.0, 1};
  SignedLog out{0.0, 1};
  int k = 0;
  // factors a+k <= 0 one by one, then the positive tail through log-gamma
  for (; k < n && a + k <= 0.0; ++k) {
    const double f = a + k;
    if (f == 0.0) return {};
    out.log_abs += std::log(-f);
    out.sign = -out.sign;
  }
  if (k < n) out.log_abs += log_gamma(a + n) - log_gamma(a + k);
  return out;
}

double log_binomial(int m, int r) {
  if (r < 0 || r > m) return -INFINITY;
  return log_gamma(m + 1.0) - log_gamma(r + 1.0) - log_gamma(m - r + 1.0);
}

ScaledValue pfq_scaled(const HypergeometricSpec& spec, double tol, int max_terms) {
  const auto& num = spec.numerator;
  const auto& den = spec.denominator;
  const double z = spec.argument;
  if (!(tol > 0.0)) throw DomainError("pFq tolerance must be positive");
  if (num.size() > den.size()) throw DomainError("pFq requires p <= q");
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("pFq argument must be finite and >= 0");
  for (double c : den) {
    if (is_nonpositive_integer(c)) throw DomainError("pFq denominator parameter is a nonpositive integer");
  }
  if (z == 0.0) return {1.0, 0.0};

  // Past this index every factor (b+m), (c+m) keeps a fixed sign.
  double most_negative = 0.0;
  for (double b : num) most_negative = std::min(most_negative, b);
  for (double c : den) most_negative = std::min(most_negative, c);
  const double m_fixed_sign = std::ceil(-most_negative) + 1.0;

  const auto ratio_at = [&](double m) {
    double r = z / (m + 1.0);
    for (double b : num) r *= b + m;
    for (double c : den) r /= c + m;
    return r;
  };

  double sum = 1.0;
  double term = 1.0;
  double log_scale = 0.0;
  double ratio = ratio_at(0.0);
  for (int m = 0; m < max_terms; ++m) {
    term *= ratio;
    if (term == 0.0) return {sum, log_scale};
    sum += term;
    if (std::abs(sum) > 0x1p600) {
      sum = std::ldexp(sum, -kRescaleExponent);
      term = std::ldexp(term, -kRescaleExponent);
      log_scale += kRescaleExponent * std::log(2.0);
    }
    const double next = ratio_at(m + 1.0);
    if (m + 1.0 >= m_fixed_sign && std::abs(next) < 1.0 && std::abs(next) <= std::abs(ratio)) {
      const double r = std::abs(next);
      const double bound = std::abs(term) * r / (1.0 - r);
      const double unit = log_scale == 0.0 ? 1.0 : std::exp(-log_scale);
      if (bound <= tol * std::max(unit, std::abs(sum))) return {sum, log_scale};
    }
    ratio = next;
  }
  throw NumericError("hypergeometric series did not converge within " + std::to_string(max_terms) + " terms");
}

double pfq(const HypergeometricSpec& spec, double tol) { return pfq_scaled(spec, tol).value(); }

ScaledValue kummer_1f1_scaled(double a, double b, double z, double tol) {
  return pfq_scaled({{a}, {b}, z}, tol);
}

double kummer_1f1(double a, double b, double z, double tol) { return kummer_1f1_scaled(a, b, z, tol).value(); }

double bessel_i(int v, double z) {
  if (v < 0) throw DomainError("bessel_i requires a nonnegative order");
  if (!(z >= 0.0)) throw DomainError("bessel_i requires z >= 0");
  if (z == 0.0) return v == 0 ? 1.0 : 0.0;
  const double half = 0.5 * z;
  double term = 1.0;
  for (int k = 1; k <= v; ++k) term *= half / k;
  double sum = term;
  const double q = half * half;
  for (int k = 0;; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0 + v));
    sum += term;
    if (k > half && term <= std::numeric_limits<double>::epsilon() * 1e-2 * sum) break;
  }
  return sum;
}

void LogSum::add(double log_term) noexcept {
  if (log_term == -INFINITY) return;
  if (log_term <= max_) {
    scaled_ += std::exp(log_term - max_);
  } else {
    scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
    max_ = log_term;
  }
}

double LogSum::log() const noexcept { return max_ == -INFINITY ? -INFINITY : max_ + std::log(scaled_); }

}  // namespace ruin
