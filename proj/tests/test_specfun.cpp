#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <cmath>
#include <random>

#include "ruin/checks.hpp"
#include "ruin/errors.hpp"
#include "ruin/specfun.hpp"

using namespace ruin;

namespace {

// Explicit term-by-term sum with long double accumulation; the oracle for pFq.
double brute_pfq(const std::vector<double>& b, const std::vector<double>& c, double z, int terms = 600) {
  long double sum = 0.0L;
  long double term = 1.0L;
  for (int m = 0; m < terms; ++m) {
    sum += term;
    long double ratio = z / (m + 1.0L);
    for (double x : b) ratio *= (x + m);
    for (double x : c) ratio /= (x + m);
    term *= ratio;
  }
  return static_cast<double>(sum);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("log_gamma") {
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-15));
  CHECK(log_gamma(5.0) == doctest::Approx(3.178053830).epsilon(1e-9));
  CHECK(log_gamma(0.5) == doctest::Approx(0.572364943).epsilon(1e-9));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-15));
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
  for (double x : {1e-3, 0.1, 3.3, 170.5, 1e4}) CHECK(rel(log_gamma(x), std::lgamma(x)) < 1e-13);
}

TEST_CASE("pochhammer") {
  CHECK(pochhammer(7.3, 0) == 1.0);
  CHECK(pochhammer(1.0, 5) == 120.0);
  CHECK(pochhammer(0.5, 3) == 15.0 / 8.0);
  CHECK(pochhammer(0.0, 4) == 0.0);
  CHECK(pochhammer(0.0, 0) == 1.0);
  const SignedLog big = log_pochhammer(2.5, 400);
  CHECK(big.sign == 1);
  CHECK(big.log_abs == doctest::Approx(std::lgamma(402.5) - std::lgamma(2.5)).epsilon(1e-13));
  const SignedLog neg = log_pochhammer(-2.5, 3);  // (-2.5)(-1.5)(-0.5)
  CHECK(neg.sign == -1);
  CHECK(neg.value() == doctest::Approx(-1.875));
  CHECK(log_pochhammer(-2.0, 5).sign == 0);
}

TEST_CASE("pFq examples") {
  CHECK(pfq({{}, {1.0, 1.5}, 0.0}, 1e-15) == 1.0);
  CHECK(pfq({{2.0}, {2.0}, 1.0}, 1e-15) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  const double f01 = pfq({{}, {1.0}, 1.0}, 1e-15);
  CHECK(f01 == doctest::Approx(2.279585302).epsilon(1e-9));
  CHECK(rel(f01, brute_pfq({}, {1.0}, 1.0)) < 1e-14);
  CHECK(rel(f01, boost::math::cyl_bessel_i(0, 2.0)) < 1e-14);
}

TEST_CASE("pFq preconditions") {
  CHECK_THROWS_AS(pfq({{1.0, 2.0}, {3.0}, 1.0}, 1e-12), DomainError);
  CHECK_THROWS_AS(pfq({{}, {-2.0}, 1.0}, 1e-12), DomainError);
  CHECK_THROWS_AS(pfq({{}, {0.0}, 1.0}, 1e-12), DomainError);
  CHECK_THROWS_AS(pfq({{}, {1.0}, -1.0}, 1e-12), DomainError);
  CHECK_THROWS_AS(pfq({{}, {1.0}, 1.0}, 0.0), DomainError);
}

TEST_CASE("pFq reports non-convergence") {
  CHECK_THROWS_AS(pfq_scaled({{}, {1.0}, 1e6}, 1e-15, 10), NumericError);
}

TEST_CASE("pFq beyond the double range keeps its logarithm") {
  // 0F1(;1;z) = I0(2 sqrt z); at z = 1e6 the value is about e^2000
  const ScaledValue v = pfq_scaled({{}, {1.0}, 1e6}, 1e-14);
  const double asymptotic = 2000.0 - 0.5 * std::log(2.0 * M_PI * 2000.0);
  CHECK(v.log_abs() == doctest::Approx(asymptotic).epsilon(1e-7));
  CHECK(std::isinf(v.value()));
}

TEST_CASE("pFq matches Boost over random specs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> par(0.2, 3.0);
  std::uniform_real_distribution<double> arg(0.0, 30.0);
  for (int i = 0; i < 40; ++i) {
    const std::vector<double> b{par(rng)};
    const std::vector<double> c{par(rng), par(rng)};
    const double z = arg(rng);
    const double boost_value = boost::math::hypergeometric_pFq(b, c, z);
    CHECK(rel(pfq({b, c, z}, 1e-16), boost_value) < 1e-12);
  }
}

TEST_CASE("kummer 1F1") {
  CHECK(kummer_1f1(0.0, 5.0, 3.0, 1e-15) == 1.0);
  CHECK(kummer_1f1(1.0, 2.0, 2.0, 1e-15) == doctest::Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-15));
  CHECK(kummer_1f1(1.0, 2.0, 2.0, 1e-15) == doctest::Approx(3.194528049).epsilon(1e-9));
  const double brute = brute_pfq({3.0}, {4.0}, 1.5);
  CHECK(rel(kummer_1f1(3.0, 4.0, 1.5, 1e-16), brute) < 1e-14);
  CHECK(rel(kummer_1f1(3.0, 4.0, 1.5, 1e-16), boost::math::hypergeometric_1F1(3.0, 4.0, 1.5)) < 1e-14);
  CHECK_THROWS_AS(kummer_1f1(1.0, -3.0, 1.0, 1e-12), DomainError);
}

TEST_CASE("bessel I") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  CHECK(bessel_i(1, 0.0) == 0.0);
  CHECK(bessel_i(2, 3.0) == doctest::Approx(bessel_i(0, 3.0) - 2.0 / 3.0 * bessel_i(1, 3.0)).epsilon(1e-13));
  for (int v : {0, 1, 2, 5})
    for (double z : {0.1, 1.0, 7.5, 30.0, 50.0})
      CHECK(rel(bessel_i(v, z), boost::math::cyl_bessel_i(v, z)) < 1e-12);
}

TEST_CASE("bessel recurrence identity") {
  for (double z : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0}) CHECK(bessel_identity_residual(z) <= 1e-12);
}

TEST_CASE("0Fn identity for the Erlang closed form") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> arg(0.0, 100.0);
  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < 30; ++i) CHECK(hypergeometric_identity_residual(n, arg(rng)) <= 1e-10);
}

TEST_CASE("Gauss gamma-ratio identity") {
  for (int n = 1; n <= 4; ++n)
    for (int m = 0; m <= 20; ++m) CHECK(gamma_ratio_residual(n, m) <= 1e-12);
}

TEST_CASE("pFq term recursion equals explicit Pochhammer products") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> par(0.1, 4.0);
  std::uniform_real_distribution<double> arg(0.0, 15.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> b;
    std::vector<double> c;
    const int q = 1 + static_cast<int>(rng() % 3);
    const int p = static_cast<int>(rng() % (q + 1));
    for (int k = 0; k < p; ++k) b.push_back(par(rng));
    for (int k = 0; k < q; ++k) c.push_back(par(rng));
    const double z = arg(rng);
    CHECK(rel(pfq({b, c, z}, 1e-17), brute_pfq(b, c, z)) < 1e-13);
  }
}

TEST_CASE("log-sum-exp accumulator") {
  LogSum s;
  CHECK(s.log() == -INFINITY);
  s.add(std::log(2.0));
  s.add(std::log(3.0));
  CHECK(s.value() == doctest::Approx(5.0));
  LogSum huge;
  huge.add(1000.0);
  huge.add(1000.0);
  CHECK(huge.log() == doctest::Approx(1000.0 + std::log(2.0)));
}
