#include "ruin/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "ruin/convolve.hpp"
#include "ruin/density.hpp"
#include "ruin/errors.hpp"
#include "ruin/quadrature.hpp"
#include "ruin/specfun.hpp"

namespace ruin {

namespace {

const MixedExponential kCaseA{0.25, 0.4, 2.0};
const MixedExponential kCaseB{1.0 / 3.0, 0.5, 2.0};
const MixedExponential kCaseC{3.0 / 7.0, 0.6, 2.0};

double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::vector<double> params_ladder(int n, double start) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = start + static_cast<double>(k) / n;
  return v;
}

struct Tracker {
  double worst = 0.0;
  std::string where;

  void see(double value, const std::string& at) {
    if (!(value <= worst)) {
      worst = value;
      where = at;
    }
  }
};

CheckResult finish(std::string name, const Tracker& t, double tol) {
  CheckResult r{std::move(name), t.worst <= tol, t.worst, tol, t.where.empty() ? "" : "worst at " + t.where};
  return r;
}

std::string point(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [k, v] : kv) {
    os << (first ? "" : " ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

CheckResult check_bessel() {
  Tracker t;
  for (double z : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0}) t.see(bessel_identity_residual(z), point({{"z", z}}));
  return finish("bessel-identity", t, 1e-12);
}

CheckResult check_hypergeometric_identity() {
  Tracker t;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < 50; ++i) {
      const double z = dist(rng);
      t.see(hypergeometric_identity_residual(n, z), point({{"n", n}, {"Z", z}}));
    }
  return finish("hypergeometric-0Fn-identity", t, 1e-10);
}

CheckResult check_gamma_ratio() {
  Tracker t;
  for (int n = 1; n <= 4; ++n)
    for (int m = 0; m <= 20; ++m) t.see(gamma_ratio_residual(n, m), point({{"n", n}, {"m", m}}));
  return finish("gamma-ratio-identity", t, 1e-12);
}

CheckResult check_pfq_naive() {
  Tracker t;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> par(0.1, 4.0);
  std::uniform_real_distribution<double> arg(0.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    const int q = 1 + static_cast<int>(rng() % 3);
    const int p = static_cast<int>(rng() % (q + 1));
    HypergeometricSpec spec;
    for (int k = 0; k < p; ++k) spec.numerator.push_back(par(rng));
    for (int k = 0; k < q; ++k) spec.denominator.push_back(par(rng));
    spec.argument = arg(rng);
    // explicit Pochhammer products, term by term
    double naive = 0.0;
    for (int m = 0; m < 400; ++m) {
      double log_term = m * std::log(spec.argument) - log_gamma(m + 1.0);
      if (m == 0) log_term = 0.0;
      int sign = 1;
      for (double b : spec.numerator) {
        const SignedLog x = log_pochhammer(b, m);
        log_term += x.log_abs;
        sign *= x.sign;
      }
      for (double c : spec.denominator) log_term -= log_pochhammer(c, m).log_abs;
      if (spec.argument == 0.0 && m > 0) break;
      naive += sign * std::exp(log_term);
    }
    t.see(relative(pfq(spec, 1e-16), naive), point({{"p", p}, {"q", q}, {"Z", spec.argument}}));
  }
  return finish("pfq-recursion-vs-naive", t, 1e-13);
}

CheckResult check_erlang_closed_vs_series() {
  Tracker t;
  const ModelParams sets[] = {{10.0, 1.1, 1.0}, {0.0, 1.1, 1.0}, {3.0, 2.0, 0.7}};
  for (int n = 1; n <= 3; ++n)
    for (const auto& p : sets) {
      const SeriesConfig cfg;
      const RuinDensity closed({p, GammaFamily{double(n), 2.0}, OrdinaryDelay{}, cfg, DensityPath::ClosedForm});
      const RuinDensity series({p, GammaFamily{double(n), 2.0}, OrdinaryDelay{}, cfg, DensityPath::GenericSeries});
      for (double x : {0.05, 0.5, 2.0, 7.5, 20.0, 60.0})
        t.see(relative(closed(x), series(x)), point({{"n", n}, {"u", p.u}, {"c", p.c}, {"lambda", p.lambda}, {"t", x}}));
    }
  return finish("erlang-closed-vs-series", t, 1e-8);
}

CheckResult check_stationary_closed_vs_series() {
  Tracker t;
  const ModelParams sets[] = {{10.0, 1.1, 1.0}, {0.0, 1.1, 1.0}, {5.0, 1.5, 2.0}};
  for (const auto& p : sets) {
    const SeriesConfig cfg;
    const RuinDensity closed({p, GammaFamily{2.0, 2.0}, StationaryDelay{}, cfg, DensityPath::ClosedForm});
    const RuinDensity series({p, GammaFamily{2.0, 2.0}, StationaryDelay{}, cfg, DensityPath::GenericSeries});
    for (double x : {0.05, 0.5, 2.0, 7.0, 20.0, 60.0})
      t.see(relative(closed(x), series(x)), point({{"u", p.u}, {"c", p.c}, {"lambda", p.lambda}, {"t", x}}));
  }
  return finish("stationary-erlang2-closed-vs-series", t, 1e-8);
}

CheckResult check_real_shape_series() {
  Tracker t;
  const ModelParams p{10.0, 1.1, 1.0};
  for (double x : {0.3, 1.0, 5.0, 10.0, 25.0, 80.0})
    t.see(relative(erlang_closed_form(p, 2, 2.0, x, 1e-14), gamma_series_form(p, 2.0, 2.0, x, SeriesConfig{})),
          point({{"t", x}}));
  return finish("gamma-series-vs-erlang", t, 1e-10);
}

CheckResult check_eta_vs_kummer(bool inject) {
  Tracker t;
  for (const auto* f : {&kCaseA, &kCaseB, &kCaseC})
    for (int m = 0; m <= 6; ++m) {
      ErlangMixture eta = mixedexp_eta_coeffs(*f, m, 1e-15);
      if (inject)
        for (double& w : eta.weights) w *= 1.0 + 1e-3;
      for (double x : {0.3, 1.5, 4.0, 10.0, 20.0})
        t.see(relative(eta(x), mixedexp_conv_f1_kummer(*f, m, x, 1e-15)), point({{"alpha", f->alpha}, {"m", m}, {"t", x}}));
    }
  return finish("eta-vs-kummer", t, 1e-9);
}

CheckResult check_gamma_coeffs_vs_kummer() {
  Tracker t;
  for (const auto* f : {&kCaseA, &kCaseB, &kCaseC})
    for (int m = 1; m <= 6; ++m) {
      const ErlangMixture g = mixedexp_gamma_coeffs(*f, m, 1e-15);
      t.see(std::abs(g.mass() - 1.0), point({{"alpha", f->alpha}, {"m", m}, {"mass", 1}}));
      for (double x : {0.3, 1.5, 4.0, 10.0, 20.0})
        t.see(relative(g(x), mixedexp_nfold_kummer(*f, m, x, 1e-15)), point({{"alpha", f->alpha}, {"m", m}, {"t", x}}));
    }
  return finish("gamma-coeffs-vs-kummer", t, 1e-9);
}

CheckResult check_mixture_vs_kummer_density() {
  Tracker t;
  for (const auto* f : {&kCaseA, &kCaseB, &kCaseC})
    for (bool stationary : {false, true}) {
      const ModelParams p{10.0, 1.1, 1.0};
      const DelaySpec delay = stationary ? DelaySpec{StationaryDelay{}} : DelaySpec{OrdinaryDelay{}};
      const RuinDensity mixture({p, *f, delay, SeriesConfig{}, DensityPath::Auto});
      const RuinDensity kummer({p, *f, delay, SeriesConfig{}, DensityPath::GenericSeries});
      for (double x : {0.5, 3.0, 12.0, 40.0})
        t.see(relative(mixture(x), kummer(x)), point({{"alpha", f->alpha}, {"stationary", stationary}, {"t", x}}));
    }
  return finish("mixedexp-mixture-vs-kummer-density", t, 1e-8);
}

CheckResult check_kendall() {
  Tracker t;
  const ModelParams p{1.0, 1.0, 1.0};
  const RuinDensity d({p, GammaFamily{1.0, 2.0}, OrdinaryDelay{}, SeriesConfig{}, DensityPath::Auto});
  for (double v : {0.2, 0.5, 1.0})
    for (double x : {1.1, 2.0, 3.5, 8.0})
      t.see(relative(p.c * d.kendall_sigma_density(v, p.u + p.c * x), d.conditional_density(v, x)),
            point({{"v", v}, {"t", x}}));
  return finish("kendall-vs-conditional", t, 1e-12);
}

CheckResult check_mixing() {
  Tracker t;
  const ModelParams p{2.0, 1.1, 1.0};
  const InterClaimFamily fam = GammaFamily{2.0, 2.0};
  const RuinDensity d({p, fam, OrdinaryDelay{}, SeriesConfig{}, DensityPath::Auto});
  for (double x : {0.5, 2.0, 6.0}) {
    const double mixed =
        integrate([&](double v) { return v >= x ? 0.0 : d.conditional_density(v, x) * family_density(fam, v); }, 0.0,
                  x, 1e-12)
            .value +
        std::exp(-p.lambda * (p.u + p.c * x)) * family_density(fam, x);
    t.see(std::abs(mixed - d(x)), point({{"t", x}}));
  }
  return finish("mixing-identity", t, 1e-8);
}

CheckResult check_lundberg_poisson() {
  Tracker t;
  const ModelParams p{3.0, 1.1, 1.0};
  const double r = adjustment_coefficient(p, GammaFamily{1.0, 0.5});
  t.see(std::abs(r - 6.0 / 11.0), "R");
  t.see(std::abs(lundberg_ultimate(p, GammaFamily{1.0, 0.5}) - 5.0 / 11.0 * std::exp(-18.0 / 11.0)), "psi(3)");
  return finish("lundberg-poisson-closed-form", t, 1e-11);
}

struct Entry {
  std::string_view name;
  std::function<CheckResult(const CheckOptions&)> run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"bessel-identity", [](const CheckOptions&) { return check_bessel(); }},
      {"hypergeometric-0Fn-identity", [](const CheckOptions&) { return check_hypergeometric_identity(); }},
      {"gamma-ratio-identity", [](const CheckOptions&) { return check_gamma_ratio(); }},
      {"pfq-recursion-vs-naive", [](const CheckOptions&) { return check_pfq_naive(); }},
      {"erlang-closed-vs-series", [](const CheckOptions&) { return check_erlang_closed_vs_series(); }},
      {"stationary-erlang2-closed-vs-series", [](const CheckOptions&) { return check_stationary_closed_vs_series(); }},
      {"gamma-series-vs-erlang", [](const CheckOptions&) { return check_real_shape_series(); }},
      {"eta-vs-kummer", [](const CheckOptions& o) { return check_eta_vs_kummer(o.inject_eta_error); }},
      {"gamma-coeffs-vs-kummer", [](const CheckOptions&) { return check_gamma_coeffs_vs_kummer(); }},
      {"mixedexp-mixture-vs-kummer-density", [](const CheckOptions&) { return check_mixture_vs_kummer_density(); }},
      {"kendall-vs-conditional", [](const CheckOptions&) { return check_kendall(); }},
      {"mixing-identity", [](const CheckOptions&) { return check_mixing(); }},
      {"lundberg-poisson-closed-form", [](const CheckOptions&) { return check_lundberg_poisson(); }},
  };
  return entries;
}

}  // namespace

double bessel_identity_residual(double z) {
  const double i2 = bessel_i(2, z);
  return std::abs(bessel_i(0, z) - 2.0 / z * bessel_i(1, z) - i2) / i2;
}

double hypergeometric_identity_residual(int n, double z) {
  const double tol = 1e-17;
  const double lhs = pfq({{}, params_ladder(n, 1.0), z}, tol) - pfq({{}, params_ladder(n, 1.0 + 1.0 / n), z}, tol);
  // the prefactor is lambda (u+ct) (beta t)^n = n^n Z
  const double factor = std::exp(n * std::log(static_cast<double>(n)) + log_gamma(n + 1.0) - log_gamma(2.0 * n + 1.0));
  const double rhs = z * factor * pfq({{}, params_ladder(n, 2.0 + 1.0 / n), z}, tol);
  return relative(lhs, rhs);
}

double gamma_ratio_residual(int n, int m) {
  const double lhs = log_gamma(n + 1.0) - log_gamma(n * (m + 1.0) + 1.0);
  double rhs = -n * m * std::log(static_cast<double>(n));
  for (int k = 0; k < n; ++k) rhs += log_gamma(1.0 + (k + 1.0) / n) - log_gamma(m + 1.0 + (k + 1.0) / n);
  return std::abs(lhs - rhs);
}

std::vector<std::string_view> list_checks() {
  std::vector<std::string_view> names;
  for (const auto& e : registry()) names.push_back(e.name);
  return names;
}

std::vector<CheckResult> run_checks(const CheckOptions& options, const std::vector<std::string>& only) {
  for (const auto& name : only) {
    const auto& r = registry();
    if (std::none_of(r.begin(), r.end(), [&](const Entry& e) { return e.name == name; }))
      throw DomainError("unknown check: " + name);
  }
  std::vector<CheckResult> results;
  for (const auto& e : registry()) {
    if (!only.empty() && std::find(only.begin(), only.end(), e.name) == only.end()) continue;
    try {
      results.push_back(e.run(options));
    } catch (const std::exception& ex) {
      results.push_back({std::string(e.name), false, INFINITY, 0.0, std::string("threw: ") + ex.what()});
    }
  }
  return results;
}

}  // namespace ruin
