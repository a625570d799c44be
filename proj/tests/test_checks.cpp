#include <doctest.h>

#include <cmath>
#include <string>

#include "ruin/checks.hpp"
#include "ruin/errors.hpp"

using namespace ruin;

TEST_CASE("every built-in check passes") {
  const auto results = run_checks();
  REQUIRE(results.size() == list_checks().size());
  for (const auto& r : results) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.passed);
    CHECK(r.measured <= r.tolerance);
  }
}

TEST_CASE("an injected coefficient error is caught") {
  CheckOptions options;
  options.inject_eta_error = true;
  const auto results = run_checks(options, {"eta-vs-kummer"});
  REQUIRE(results.size() == 1);
  CHECK_FALSE(results[0].passed);
  CHECK(results[0].measured > results[0].tolerance);
}

TEST_CASE("checks can be selected by name") {
  const auto names = list_checks();
  CHECK(names.size() >= 10);
  const auto one = run_checks({}, {std::string(names.front())});
  REQUIRE(one.size() == 1);
  CHECK(one[0].name == names.front());
  CHECK_THROWS_AS(static_cast<void>(run_checks({}, {"no-such-check"})), DomainError);
}

TEST_CASE("identity residuals") {
  // for small z the left side cancels to I2 ~ z^2/8, so only moderate z is well conditioned
  for (double z : {0.5, 1.0, 30.0, 500.0}) CHECK(bessel_identity_residual(z) < 1e-12);
  for (int n = 1; n <= 5; ++n)
    for (double z : {0.1, 2.0, 40.0}) {
      CAPTURE(n);
      CAPTURE(z);
      CHECK(hypergeometric_identity_residual(n, z) < 1e-12);
    }
  for (int n = 1; n <= 6; ++n)
    for (int m = 0; m <= 8; ++m) CHECK(gamma_ratio_residual(n, m) < 1e-11);
}
