#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ruin {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Worst deviation seen, in the units of `tolerance`.
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CheckOptions {
  /// Test hook: scales every eta coefficient by (1 + 1e-3) before comparing.
  bool inject_eta_error = false;
};

/// Names of the identity and cross-path checks, in run order.
std::vector<std::string_view> list_checks();

/// Runs the named checks (all when `only` is empty). Unknown names throw DomainError.
std::vector<CheckResult> run_checks(const CheckOptions& options = {}, const std::vector<std::string>& only = {});

/// |I0(z) - (2/z) I1(z) - I2(z)| / I2(z).
double bessel_identity_residual(double z);

/// Relative residual of
///   0Fn(1, 1+1/n, ..., 1+(n-1)/n; Z) - 0Fn(1+1/n, ..., 2; Z) = n^n Z n!/(2n)! 0Fn(2+1/n, ..., 3; Z).
double hypergeometric_identity_residual(int n, double z);

/// |log lhs - log rhs| of
///   Gamma(n+1)/Gamma(n(m+1)+1) = n^{-nm} prod_k Gamma(1+(k+1)/n)/Gamma(m+1+(k+1)/n).
double gamma_ratio_residual(int n, int m);

}  // namespace ruin
