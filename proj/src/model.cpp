#include "ruin/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "ruin/errors.hpp"
#include "ruin/specfun.hpp"

namespace ruin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

double gamma_density(const GammaFamily& g, double t) {
  if (t < 0.0) return 0.0;
  if (t == 0.0) {
    if (g.shape < 1.0) return std::numeric_limits<double>::infinity();
    return g.shape == 1.0 ? g.rate : 0.0;
  }
  return std::exp(g.shape * std::log(g.rate) + (g.shape - 1.0) * std::log(t) - g.rate * t -
                  log_gamma(g.shape));
}

double gamma_survival(const GammaFamily& g, double t) {
  if (t <= 0.0) return 1.0;
  const double x = g.rate * t;
  if (auto k = integer_shape(g.shape); k && *k <= 50) {
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < *k; ++i) {
      term *= x / i;
      sum += term;
    }
    return std::exp(-x) * sum;
  }
  return boost::math::gamma_q(g.shape, x);
}

}  // namespace

double DensityGrid::end() const noexcept {
  return values.empty() ? t0 : time(values.size() - 1);
}

double DensityGrid::at(double t) const noexcept {
  if (values.empty() || t < t0) return 0.0;
  const double x = (t - t0) / dt;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= values.size()) return i + 1 == values.size() && x == static_cast<double>(i) ? values.back() : 0.0;
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

double DensityGrid::integral() const noexcept {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * dt;
}

void DensityGrid::validate(const std::string& what) const {
  if (!(std::isfinite(t0) && t0 >= 0.0)) throw DomainError(what + ": grid start t0 must be >= 0");
  if (!positive_finite(dt)) throw DomainError(what + ": grid step dt must be positive");
  if (values.size() < 2) throw DomainError(what + ": grid needs at least two points");
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError(what + ": grid values must be finite and >= 0");
  }
}

void SeriesConfig::validate() const {
  if (!positive_finite(tol)) throw DomainError("series tol must be positive");
  if (max_terms < 1) throw DomainError("series max_terms must be >= 1");
  if (!positive_finite(coeff_tol)) throw DomainError("series coeff_tol must be positive");
  if (!positive_finite(grid_dt)) throw DomainError("series grid_dt must be positive");
}

std::optional<int> integer_shape(double shape) {
  const double r = std::round(shape);
  if (r >= 1.0 && r <= 1e6 && std::abs(shape - r) <= 1e-12 * r) return static_cast<int>(r);
  return std::nullopt;
}

void validate_params(const ModelParams& m) {
  if (!(std::isfinite(m.u) && m.u >= 0.0)) throw DomainError("initial surplus u must be finite and >= 0 (got " + fmt(m.u) + ")");
  if (!positive_finite(m.c)) throw DomainError("premium rate c must be finite and > 0 (got " + fmt(m.c) + ")");
  if (!positive_finite(m.lambda)) throw DomainError("claim parameter lambda must be finite and > 0 (got " + fmt(m.lambda) + ")");
}

void validate_family(const InterClaimFamily& family) {
  std::visit(overloaded{
                 [](const GammaFamily& g) {
                   if (!positive_finite(g.shape)) throw DomainError("gamma shape n must be > 0 (got " + fmt(g.shape) + ")");
                   if (!positive_finite(g.rate)) throw DomainError("gamma rate beta must be > 0 (got " + fmt(g.rate) + ")");
                 },
                 [](const MixedExponential& m) {
                   if (!(std::isfinite(m.p) && m.p > 0.0 && m.p < 1.0))
                     throw DomainError("mixed exponential weight p must lie in (0,1) (got " + fmt(m.p) + ")");
                   if (!positive_finite(m.alpha)) throw DomainError("mixed exponential alpha must be > 0 (got " + fmt(m.alpha) + ")");
                   if (!positive_finite(m.beta)) throw DomainError("mixed exponential beta must be > 0 (got " + fmt(m.beta) + ")");
                   if (!(m.beta > m.alpha))
                     throw DomainError("mixed exponential requires beta > alpha (got alpha=" + fmt(m.alpha) +
                                       ", beta=" + fmt(m.beta) + ")");
                 },
                 [](const TabulatedFamily& t) {
                   t.grid.validate("tabulated density");
                   const double mass = anchored_at_zero(t.grid).integral();
                   if (std::abs(mass - 1.0) > kGridMassTolerance)
                     throw DomainError("tabulated density must integrate to 1 (got " + fmt(mass) + ")");
                 },
             },
             family);
}

Model validate(const ModelParams& params, const InterClaimFamily& family, const DelaySpec& delay) {
  validate_params(params);
  validate_family(family);
  if (const auto* e = std::get_if<ExplicitDelay>(&delay)) {
    e->grid.validate("delay density");
    const double mass = anchored_at_zero(e->grid).integral();
    if (std::abs(mass - 1.0) > kGridMassTolerance)
      throw DomainError("delay density must integrate to 1 (got " + fmt(mass) + ")");
  }
  const Moments mom = moments(family);
  if (std::holds_alternative<StationaryDelay>(delay) && !positive_finite(mom.mean))
    throw UnsupportedError("stationary delay requires an inter-claim law with finite positive mean");

  Model model{params, family, delay, true, {}};
  model.net_profit = params.c * mom.mean > 1.0 / params.lambda;
  if (!model.net_profit) {
    model.warnings.push_back("net profit condition c*E[T1] > 1/lambda fails (" + fmt(params.c * mom.mean) +
                             " <= " + fmt(1.0 / params.lambda) + "); ultimate ruin is certain");
  }
  return model;
}

Moments moments(const InterClaimFamily& family) {
  return std::visit(overloaded{
                        [](const GammaFamily& g) {
                          return Moments{g.shape / g.rate, g.shape / (g.rate * g.rate)};
                        },
                        [](const MixedExponential& m) {
                          const double mean = m.p / m.alpha + m.q() / m.beta;
                          const double second = 2.0 * m.p / (m.alpha * m.alpha) + 2.0 * m.q() / (m.beta * m.beta);
                          return Moments{mean, second - mean * mean};
                        },
                        [](const TabulatedFamily& tf) {
                          const DensityGrid g = anchored_at_zero(tf.grid);
                          DensityGrid first = g;
                          DensityGrid second = g;
                          for (std::size_t i = 0; i < g.size(); ++i) {
                            first.values[i] *= g.time(i);
                            second.values[i] *= g.time(i) * g.time(i);
                          }
                          const double mass = g.integral();
                          const double mean = first.integral() / mass;
                          return Moments{mean, second.integral() / mass - mean * mean};
                        },
                    },
                    family);
}

double family_density(const InterClaimFamily& family, double t) {
  return std::visit(overloaded{
                        [t](const GammaFamily& g) { return gamma_density(g, t); },
                        [t](const MixedExponential& m) {
                          if (t < 0.0) return 0.0;
                          return m.p * m.alpha * std::exp(-m.alpha * t) + m.q() * m.beta * std::exp(-m.beta * t);
                        },
                        [t](const TabulatedFamily& tf) { return tf.grid.at(t); },
                    },
                    family);
}

double family_survival(const InterClaimFamily& family, double t) {
  return std::visit(overloaded{
                        [t](const GammaFamily& g) { return gamma_survival(g, t); },
                        [t](const MixedExponential& m) {
                          if (t <= 0.0) return 1.0;
                          return m.p * std::exp(-m.alpha * t) + m.q() * std::exp(-m.beta * t);
                        },
                        [t](const TabulatedFamily& tf) {
                          const DensityGrid g = anchored_at_zero(tf.grid);
                          if (t <= 0.0) return 1.0;
                          // trapezoid mass of the linear interpolant up to t
                          double mass = 0.0;
                          for (std::size_t i = 0; i + 1 < g.size() && g.time(i) < t; ++i) {
                            const double b = std::min(t, g.time(i + 1));
                            const double h = b - g.time(i);
                            mass += 0.5 * h * (g.values[i] + g.at(b));
                          }
                          return std::max(0.0, 1.0 - mass / g.integral());
                        },
                    },
                    family);
}

double delay_density(const InterClaimFamily& family, const DelaySpec& delay, double t) {
  return std::visit(overloaded{
                        [&](const OrdinaryDelay&) { return family_density(family, t); },
                        [&](const StationaryDelay&) {
                          if (t < 0.0) return 0.0;
                          if (const auto* tf = std::get_if<TabulatedFamily>(&family))
                            return equilibrium_grid(anchored_at_zero(tf->grid)).at(t);
                          const double mean = moments(family).mean;
                          if (!positive_finite(mean))
                            throw UnsupportedError("stationary delay requires a finite positive mean");
                          return family_survival(family, t) / mean;
                        },
                        [&](const ExplicitDelay& e) { return e.grid.at(t); },
                    },
                    delay);
}

DensityGrid anchored_at_zero(const DensityGrid& grid) {
  if (grid.t0 == 0.0) return grid;
  const double k = grid.t0 / grid.dt;
  const double kr = std::round(k);
  if (std::abs(k - kr) > 1e-9 * std::max(1.0, kr))
    throw DomainError("grid start must be a multiple of its step to be anchored at 0");
  DensityGrid out{0.0, grid.dt, std::vector<double>(static_cast<std::size_t>(kr), 0.0)};
  out.values.insert(out.values.end(), grid.values.begin(), grid.values.end());
  return out;
}

DensityGrid equilibrium_grid(const DensityGrid& density) {
  const DensityGrid g = anchored_at_zero(density);
  const double mass = g.integral();
  double mean = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    // exact integral of t * (linear interpolant) over the cell
    const double a = g.time(i);
    const double h = g.dt;
    const double f0 = g.values[i];
    const double f1 = g.values[i + 1];
    mean += h * (f0 * (a / 2.0 + h / 6.0) + f1 * (a / 2.0 + h / 3.0));
  }
  mean /= mass;
  if (!positive_finite(mean)) throw UnsupportedError("equilibrium density needs a finite positive mean");
  DensityGrid out{0.0, g.dt, std::vector<double>(g.size(), 0.0)};
  double cum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i > 0) cum += 0.5 * g.dt * (g.values[i - 1] + g.values[i]);
    out.values[i] = std::max(0.0, 1.0 - cum / mass) / mean;
  }
  return out;
}

std::string family_name(const InterClaimFamily& family) {
  return std::visit(overloaded{
                        [](const GammaFamily&) { return std::string("gamma"); },
                        [](const MixedExponential&) { return std::string("mixedexp"); },
                        [](const TabulatedFamily&) { return std::string("tabulated"); },
                    },
                    family);
}

std::string delay_name(const DelaySpec& delay) {
  return std::visit(overloaded{
                        [](const OrdinaryDelay&) { return std::string("ordinary"); },
                        [](const StationaryDelay&) { return std::string("stationary"); },
                        [](const ExplicitDelay&) { return std::string("file"); },
                    },
                    delay);
}

}  // namespace ruin
