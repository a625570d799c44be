#include "ruin/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "ruin/errors.hpp"

namespace ruin {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double kronrod = kWk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXk[j];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kWk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

double total_of(std::vector<Panel> panels, double Panel::*field) {
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double sum = 0.0;
  for (const auto& p : panels) sum += p.*field;
  return sum;
}

// Integrand with the substitution s = w^(1/a) on [0, h]: absorbs s^(a-1).
double power_substituted(const RuinDensity& density, double a, double w) {
  const double s = std::pow(w, 1.0 / a);
  if (!(s > 0.0)) return 0.0;
  return density.density_at(s) * s / (a * w);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           int max_panels) {
  if (!(abs_tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("quadrature needs finite a <= b");
  if (a == b) return {};
  const auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(by_error)> queue(by_error);
  Panel first = gk15(f, a, b);
  queue.push(first);
  long evaluations = 15;
  double error = first.error;
  int count = 1;
  while (error > abs_tol) {
    if (count >= max_panels) {
      std::vector<Panel> all;
      while (!queue.empty()) {
        all.push_back(queue.top());
        queue.pop();
      }
      throw QuadratureError("adaptive quadrature did not reach tolerance " + std::to_string(abs_tol) + " in " +
                                std::to_string(max_panels) + " panels (estimate " + std::to_string(error) + ")",
                            total_of(all, &Panel::value), total_of(all, &Panel::error));
    }
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature panel became too narrow", first.value, error);
    }
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    evaluations += 30;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++count;
    // the running error drifts by rounding; recompute it exactly when it looks converged
    if (error <= abs_tol) {
      std::vector<Panel> all;
      auto copy = queue;
      while (!copy.empty()) {
        all.push_back(copy.top());
        copy.pop();
      }
      error = total_of(all, &Panel::error);
    }
  }
  std::vector<Panel> all;
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  return {total_of(all, &Panel::value), total_of(all, &Panel::error), evaluations, count};
}

RuinProbResult ruin_prob_between(const RuinDensity& density, double a, double b, double quad_tol) {
  if (!(a >= 0.0) || !(b >= a) || !std::isfinite(b)) throw DomainError("ruin probability needs 0 <= a <= b < inf");
  if (!(quad_tol > 0.0)) throw DomainError("quad-tol must be positive");
  if (a == b) return {};
  const auto p = [&density](double t) { return density.density_at(t); };
  const double exponent = density.small_time_exponent();
  QuadratureResult head{};
  QuadratureResult body{};
  if (a == 0.0 && exponent < 1.0) {
    const double h = std::min(b, 1.0);
    head = integrate([&](double w) { return power_substituted(density, exponent, w); }, 0.0, std::pow(h, exponent),
                     0.5 * quad_tol);
    body = integrate(p, h, b, 0.5 * quad_tol);
  } else {
    body = integrate(p, a, b, quad_tol);
  }
  const double value = head.value + body.value;
  const double error = head.abs_error_estimate + body.abs_error_estimate;
  const long evaluations = head.evaluations + body.evaluations;
  if (value < -(error + quad_tol) || value > 1.0 + error + quad_tol || !std::isfinite(value)) {
    throw NumericError("ruin probability " + std::to_string(value) + " outside [0, 1] beyond its error estimate");
  }
  return {std::clamp(value, 0.0, 1.0), error, evaluations};
}

RuinProbResult ruin_prob(const RuinDensity& density, double t, double quad_tol) {
  if (!(t >= 0.0)) throw DomainError("ruin probability needs t >= 0");
  return ruin_prob_between(density, 0.0, t, quad_tol);
}

RuinProbResult ruin_prob(const DensityQuery& query, double t, double quad_tol) {
  return ruin_prob(RuinDensity(query), t, quad_tol);
}

DensityGrid tabulate_density(const RuinDensity& density, double t_max, double dt, int threads) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("t-max must be positive");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (dt > t_max) throw DomainError("dt must not exceed t-max");
  // tolerate t_max / dt landing a hair below an integer
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt * (1.0 + 1e-12)));
  DensityGrid grid{dt, dt, std::vector<double>(n)};
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : static_cast<std::size_t>(threads), 1, n);
  const auto fill = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) grid.values[i] = density.density_at(grid.time(i));
  };
  if (workers == 1) {
    fill(0);
    return grid;
  }
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        fill(w);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : failures)
    if (e) std::rethrow_exception(e);
  return grid;
}

DensityGrid tabulate_density(const DensityQuery& query, double t_max, double dt, int threads) {
  return tabulate_density(RuinDensity(query), t_max, dt, threads);
}

double laplace_transform(const InterClaimFamily& family, double s) {
  if (!(s >= 0.0)) throw DomainError("Laplace transform needs s >= 0");
  if (const auto* g = std::get_if<GammaFamily>(&family)) return std::pow(g->rate / (g->rate + s), g->shape);
  if (const auto* m = std::get_if<MixedExponential>(&family))
    return m->p * m->alpha / (m->alpha + s) + m->q() * m->beta / (m->beta + s);
  const auto& grid = std::get<TabulatedFamily>(family).grid;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = (i == 0 || i + 1 == grid.size()) ? 0.5 : 1.0;
    sum += w * grid.values[i] * std::exp(-s * grid.time(i));
  }
  return sum * grid.dt;
}

double adjustment_coefficient(const ModelParams& params, const InterClaimFamily& family) {
  validate_params(params);
  validate_family(family);
  const double lambda = params.lambda;
  if (!(params.c * moments(family).mean > 1.0 / lambda)) {
    throw DomainError("no adjustment coefficient: net profit condition c E[T1] > 1/lambda fails");
  }
  // h is convex with h(0) = 0, h'(0) < 0 and h(lambda) > 0
  const auto h = [&](double r) { return lambda * laplace_transform(family, params.c * r) - (lambda - r); };
  double lo = 0.5 * lambda;
  for (int i = 0; h(lo) >= 0.0; ++i) {
    if (i == 200) throw NumericError("adjustment coefficient: could not bracket the root");
    lo *= 0.5;
  }
  double hi = lambda;
  while (hi - lo > 1e-12 * std::max(1.0, lambda)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double lundberg_ultimate(const ModelParams& params, const InterClaimFamily& family) {
  const double r = adjustment_coefficient(params, family);
  return (1.0 - r / params.lambda) * std::exp(-r * params.u);
}

}  // namespace ruin
