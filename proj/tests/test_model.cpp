#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "ruin/errors.hpp"
#include "ruin/model.hpp"

using namespace ruin;

namespace {

double integrate_to_inf(const std::function<double(double)>& f, double a = 0.0) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, std::numeric_limits<double>::infinity(), 15, 1e-13, &err);
}

const MixedExponential kCaseA{0.25, 0.4, 2.0};
const MixedExponential kCaseB{1.0 / 3.0, 0.5, 2.0};
const MixedExponential kCaseC{3.0 / 7.0, 0.6, 2.0};

}  // namespace

TEST_CASE("validate accepts the gamma(2) reference parameters") {
  const Model m = validate({10.0, 1.1, 1.0}, GammaFamily{2.0, 2.0}, OrdinaryDelay{});
  CHECK(m.net_profit);
  CHECK(m.warnings.empty());
}

TEST_CASE("validate names the violated invariant") {
  SUBCASE("negative surplus") {
    CHECK_THROWS_WITH_AS(validate({-1.0, 1.1, 1.0}, GammaFamily{2.0, 2.0}, OrdinaryDelay{}),
                         doctest::Contains("surplus u"), DomainError);
  }
  SUBCASE("mixed exponential rates out of order") {
    CHECK_THROWS_WITH_AS(validate({0.0, 1.1, 1.0}, MixedExponential{0.25, 2.0, 0.4}, OrdinaryDelay{}),
                         doctest::Contains("beta > alpha"), DomainError);
  }
  SUBCASE("weight outside (0,1)") {
    CHECK_THROWS_AS(validate({0.0, 1.1, 1.0}, MixedExponential{1.0, 0.4, 2.0}, OrdinaryDelay{}), DomainError);
  }
  SUBCASE("premium and claim rates") {
    CHECK_THROWS_AS(validate({0.0, 0.0, 1.0}, GammaFamily{2.0, 2.0}, OrdinaryDelay{}), DomainError);
    CHECK_THROWS_AS(validate({0.0, 1.0, -2.0}, GammaFamily{2.0, 2.0}, OrdinaryDelay{}), DomainError);
    CHECK_THROWS_AS(validate({0.0, 1.0, NAN}, GammaFamily{2.0, 2.0}, OrdinaryDelay{}), DomainError);
  }
  SUBCASE("tabulated mass") {
    const DensityGrid half{0.0, 0.5, {0.5, 0.5, 0.5}};
    CHECK_THROWS_AS(validate({0.0, 1.0, 1.0}, TabulatedFamily{half}, OrdinaryDelay{}), DomainError);
  }
}

TEST_CASE("negative loading is a warning, not an error") {
  const Model m = validate({0.0, 0.5, 1.0}, GammaFamily{2.0, 2.0}, OrdinaryDelay{});
  CHECK_FALSE(m.net_profit);
  REQUIRE(m.warnings.size() == 1);
  CHECK(m.warnings[0].find("net profit") != std::string::npos);
}

TEST_CASE("moments of the published mixed exponential cases") {
  const Moments a = moments(kCaseA);
  CHECK(a.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.variance == doctest::Approx(2.5).epsilon(1e-14));
  const Moments b = moments(kCaseB);
  CHECK(b.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.variance == doctest::Approx(2.0).epsilon(1e-14));
  const Moments c = moments(kCaseC);
  CHECK(c.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.variance == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("gamma moments are n/beta and n/beta^2") {
  for (double n : {0.5, 1.0, 2.0, 3.7})
    for (double beta : {0.5, 2.0, 7.0}) {
      const Moments m = moments(GammaFamily{n, beta});
      CHECK(m.mean == n / beta);
      CHECK(m.variance == n / (beta * beta));
    }
}

TEST_CASE("mixed exponential moments match numeric integration") {
  for (const auto& f : {kCaseA, kCaseB, kCaseC}) {
    const double mean = integrate_to_inf([&](double t) { return t * family_density(f, t); });
    const double second = integrate_to_inf([&](double t) { return t * t * family_density(f, t); });
    CHECK(std::abs(mean - (f.p / f.alpha + f.q() / f.beta)) < 1e-10);
    CHECK(std::abs(second - (2 * f.p / (f.alpha * f.alpha) + 2 * f.q() / (f.beta * f.beta))) < 1e-10);
  }
}

TEST_CASE("tabulated moments are numeric") {
  DensityGrid g{0.0, 1e-3, {}};
  for (int i = 0; i <= 40000; ++i) g.values.push_back(std::exp(-g.time(i)));
  const Moments m = moments(TabulatedFamily{g});
  CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(m.variance == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("delay density examples") {
  CHECK(delay_density(GammaFamily{2.0, 2.0}, StationaryDelay{}, 1.0) ==
        doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(delay_density(GammaFamily{2.0, 2.0}, StationaryDelay{}, 1.0) == doctest::Approx(0.406005850).epsilon(1e-9));
  CHECK(delay_density(GammaFamily{2.0, 2.0}, OrdinaryDelay{}, 0.0) == 0.0);
  // equilibrium density at 0 is 1/mean; the oracle integrates the survival function
  const double tail = integrate_to_inf([](double t) { return family_density(kCaseB, t); });
  CHECK(delay_density(kCaseB, StationaryDelay{}, 0.0) == doctest::Approx(tail / moments(kCaseB).mean).epsilon(1e-12));
  CHECK(delay_density(kCaseB, StationaryDelay{}, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("stationary delay for a non-integer shape uses the upper incomplete gamma function") {
  const GammaFamily g{0.5, 1.3};
  for (double t : {0.01, 0.4, 2.0, 6.0}) {
    const double tail = integrate_to_inf([&](double s) { return family_density(g, s); }, t);
    CHECK(delay_density(g, StationaryDelay{}, t) == doctest::Approx(tail / moments(g).mean).epsilon(1e-9));
  }
}

TEST_CASE("every delay density integrates to one") {
  const InterClaimFamily families[] = {GammaFamily{2.0, 2.0}, GammaFamily{0.5, 1.0}, GammaFamily{3.0, 1.5},
                                       kCaseA, kCaseB, kCaseC};
  for (const auto& f : families)
    for (const DelaySpec& d : {DelaySpec{OrdinaryDelay{}}, DelaySpec{StationaryDelay{}}}) {
      // t = w^2 removes the t^(-1/2) singularity of the half-shape density
      const double mass = integrate_to_inf([&](double w) { return w == 0.0 ? 0.0 : 2.0 * w * delay_density(f, d, w * w); });
      CHECK_MESSAGE(std::abs(mass - 1.0) < 1e-8, family_name(f) << " " << delay_name(d));
    }
}

TEST_CASE("stationary mixed exponential delay density is nonincreasing") {
  for (const auto& f : {kCaseA, kCaseB, kCaseC}) {
    double prev = delay_density(f, StationaryDelay{}, 0.0);
    for (double t = 0.05; t < 40.0; t += 0.05) {
      const double cur = delay_density(f, StationaryDelay{}, t);
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("explicit delay interpolates its grid") {
  const DensityGrid g{0.0, 0.5, {0.0, 1.0, 1.0, 0.0}};
  const ExplicitDelay d{g};
  CHECK(delay_density(GammaFamily{1.0, 1.0}, d, 0.25) == doctest::Approx(0.5));
  CHECK(delay_density(GammaFamily{1.0, 1.0}, d, 1.0) == doctest::Approx(1.0));
  CHECK(delay_density(GammaFamily{1.0, 1.0}, d, 3.0) == 0.0);
}

TEST_CASE("equilibrium grid of a tabulated exponential is itself") {
  DensityGrid g{0.0, 1e-3, {}};
  for (int i = 0; i <= 30000; ++i) g.values.push_back(2.0 * std::exp(-2.0 * g.time(i)));
  const DensityGrid e = equilibrium_grid(g);
  for (double t : {0.0, 0.5, 2.0}) CHECK(e.at(t) == doctest::Approx(g.at(t)).epsilon(1e-5));
}

TEST_CASE("integer shapes are recognised") {
  CHECK(integer_shape(2.0) == 2);
  CHECK(integer_shape(1.0) == 1);
  CHECK_FALSE(integer_shape(0.5).has_value());
  CHECK_FALSE(integer_shape(2.3).has_value());
}

TEST_CASE("series configuration must be positive") {
  CHECK_NOTHROW(SeriesConfig{}.validate());
  CHECK_THROWS_AS((SeriesConfig{0.0, 10, 1e-14, 1e-3}.validate()), DomainError);
  CHECK_THROWS_AS((SeriesConfig{1e-12, 0, 1e-14, 1e-3}.validate()), DomainError);
}
