#include "ruin/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ruin/errors.hpp"
#include "ruin/specfun.hpp"

namespace ruin {

namespace {

constexpr std::size_t kMaxMixtureTerms = 1'000'000;
constexpr double kLinearFloor = -700.0;

// exp(log_start) * (shift)_j / j! * y^j for j = 0, 1, ...
struct CoefficientStream {
  double log_start;
  double shift;
};

// Sums the streams term by term until the remaining weight is certified below
// coeff_tol. For integer shift >= 1 the step ratio y (shift + j) / (j + 1) is
// nonincreasing in j, so the tail past j is bounded by v_{j+1} / (1 - ratio).
std::vector<double> sum_streams(std::vector<CoefficientStream> streams, double y, double coeff_tol) {
  const double log_y = std::log(y);
  const double log_1my = std::log1p(-y);
  const double drop_below = std::log(coeff_tol) - std::log(static_cast<double>(streams.size()) + 1.0) - 5.0;
  std::erase_if(streams, [&](const CoefficientStream& s) { return s.log_start - s.shift * log_1my < drop_below; });

  const std::size_t n = streams.size();
  std::vector<double> value(n);
  std::vector<double> log_value(n);
  std::vector<bool> linear(n);
  for (std::size_t r = 0; r < n; ++r) {
    log_value[r] = streams[r].log_start;
    linear[r] = log_value[r] >= kLinearFloor;
    value[r] = linear[r] ? std::exp(log_value[r]) : 0.0;
  }

  std::vector<double> weights;
  for (std::size_t j = 0; j < kMaxMixtureTerms; ++j) {
    double w = 0.0;
    for (std::size_t r = 0; r < n; ++r) w += value[r];
    weights.push_back(w);

    // advance every stream to j + 1 and bound what is left
    const double jd = static_cast<double>(j);
    double tail = 0.0;
    bool bounded = true;
    for (std::size_t r = 0; r < n; ++r) {
      const double s = streams[r].shift;
      const double step = y * (s + jd) / (jd + 1.0);
      if (linear[r]) {
        value[r] *= step;
      } else if (step > 0.0) {
        log_value[r] += log_y + std::log((s + jd) / (jd + 1.0));
        if (log_value[r] >= kLinearFloor) {
          linear[r] = true;
          value[r] = std::exp(log_value[r]);
        }
      } else {
        log_value[r] = -INFINITY;
      }
      if (s == 0.0) continue;  // (0)_j = 0 for j >= 1
      const double next_step = y * (s + jd + 1.0) / (jd + 2.0);
      if (next_step >= 1.0) {
        bounded = false;
        continue;
      }
      const double v = linear[r] ? value[r] : std::exp(log_value[r]);
      tail += v / (1.0 - next_step);
    }
    if (bounded && tail < coeff_tol) return weights;
  }
  throw NumericError("Erlang mixture coefficients did not reach coeff_tol within 10^6 terms");
}

void require_valid(const MixedExponential& f) {
  validate_family(InterClaimFamily{f});
}

}  // namespace

double ErlangMixture::operator()(double t) const {
  if (t < 0.0 || weights.empty()) return 0.0;
  if (t == 0.0) return offset == 1 ? weights[0] * beta : 0.0;
  std::vector<double> log_e(weights.size());
  log_e[0] = log_erlang_density(offset, beta, t);
  const double log_bt = std::log(beta * t);
  for (std::size_t j = 1; j < weights.size(); ++j)
    log_e[j] = log_e[j - 1] + log_bt - std::log(static_cast<double>(offset) + static_cast<double>(j) - 1.0);
  const double top = *std::max_element(log_e.begin(), log_e.end());
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * std::exp(log_e[j] - top);
  return s * std::exp(top);
}

double ErlangMixture::mass() const noexcept {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double log_erlang_density(int m, double beta, double t) {
  if (m < 1) throw DomainError("Erlang order must be >= 1");
  return log_gamma_density(static_cast<double>(m), beta, t);
}

double erlang_density(int m, double beta, double t) { return std::exp(log_erlang_density(m, beta, t)); }

double log_gamma_density(double shape, double rate, double t) {
  if (t < 0.0) return -INFINITY;
  if (t == 0.0) {
    if (shape < 1.0) return INFINITY;
    return shape == 1.0 ? std::log(rate) : -INFINITY;
  }
  return shape * std::log(rate) + (shape - 1.0) * std::log(t) - rate * t - log_gamma(shape);
}

double gamma_density(double shape, double rate, double t) { return std::exp(log_gamma_density(shape, rate, t)); }

double gamma_nfold(double n, double beta, int m, double t) {
  if (m < 1) throw DomainError("gamma_nfold requires m >= 1");
  if (t == 0.0 && n * m < 1.0) throw DomainError("gamma_nfold: density is singular at t = 0 for n m < 1");
  return gamma_density(n * m, beta, t);
}

double log_gamma_conv_f1_ordinary(double n, double beta, int m, double t) {
  if (m < 0) throw DomainError("gamma_conv_f1_ordinary requires m >= 0");
  return std::log(n / beta) + log_gamma_density(n * (m + 1) + 1.0, beta, t);
}

double gamma_conv_f1_ordinary(double n, double beta, int m, double t) {
  return std::exp(log_gamma_conv_f1_ordinary(n, beta, m, t));
}

double stationary_erlang2_conv(double beta, int m, double t, DelayKernel which) {
  if (m < 0) throw DomainError("stationary_erlang2_conv requires m >= 0");
  if (t < 0.0) return 0.0;
  if (which == DelayKernel::F0) return 0.5 * (erlang_density(2 * m + 1, beta, t) + erlang_density(2 * m + 2, beta, t));
  return 0.5 / beta * erlang_density(2 * m + 2, beta, t) + erlang_density(2 * m + 3, beta, t) / beta;
}

ErlangMixture mixedexp_gamma_coeffs(const MixedExponential& f, int m, double coeff_tol) {
  require_valid(f);
  if (m < 1) throw DomainError("gamma coefficients require m >= 1");
  const double q = f.q();
  const double log_rho = std::log(f.alpha * f.p / (f.beta * q));
  std::vector<CoefficientStream> streams;
  streams.reserve(static_cast<std::size_t>(m) + 1);
  for (int r = 0; r <= m; ++r)
    streams.push_back({m * std::log(q) + log_binomial(m, r) + r * log_rho, static_cast<double>(r)});
  return {f.beta, m, sum_streams(std::move(streams), 1.0 - f.alpha / f.beta, coeff_tol)};
}

ErlangMixture mixedexp_eta_coeffs(const MixedExponential& f, int m, double coeff_tol) {
  require_valid(f);
  if (m < 0) throw DomainError("eta coefficients require m >= 0");
  const double q = f.q();
  const double log_rho = std::log(f.alpha * f.p / (f.beta * q));
  const double log_front = m * std::log(q) - 2.0 * std::log(f.beta);
  std::vector<CoefficientStream> streams;
  streams.reserve(2 * static_cast<std::size_t>(m) + 2);
  for (int r = 0; r <= m; ++r) {
    const double base = log_front + log_binomial(m, r) + r * log_rho;
    streams.push_back({base + std::log(f.alpha * f.p), r + 2.0});
    streams.push_back({base + std::log(f.beta * q), static_cast<double>(r)});
  }
  return {f.beta, m + 2, sum_streams(std::move(streams), 1.0 - f.alpha / f.beta, coeff_tol)};
}

ErlangMixture mixedexp_conv_mixture(const MixedExponential& f, int m, std::span<const GammaPairTerm> kernel,
                                    double coeff_tol) {
  require_valid(f);
  if (m < 0) throw DomainError("convolution power must be >= 0");
  if (kernel.empty()) throw DomainError("empty convolution kernel");
  const int order = kernel.front().alpha_shape + kernel.front().beta_shape;
  for (const auto& k : kernel) {
    if (k.alpha_shape < 0 || k.beta_shape < 0 || k.alpha_shape + k.beta_shape != order || !(k.weight > 0.0))
      throw DomainError("kernel terms must share alpha_shape + beta_shape and have positive weight");
  }
  if (m + order < 1) throw DomainError("convolution is a point mass; no density");
  const double log_ratio = std::log(f.alpha / f.beta);
  std::vector<CoefficientStream> streams;
  for (int r = 0; r <= m; ++r) {
    const double base = log_binomial(m, r) + r * std::log(f.p) + (m - r) * std::log(f.q());
    for (const auto& k : kernel) {
      const int a = r + k.alpha_shape;
      streams.push_back({base + std::log(k.weight) + a * log_ratio, static_cast<double>(a)});
    }
  }
  return {f.beta, m + order, sum_streams(std::move(streams), 1.0 - f.alpha / f.beta, coeff_tol)};
}

double log_gamma_pair_conv(int k1, double a, int k2, double b, double t, double tol) {
  if (k1 < 0 || k2 < 0 || k1 + k2 < 1) throw DomainError("gamma pair convolution needs k1, k2 >= 0 and k1 + k2 >= 1");
  const int k = k1 + k2;
  if (t < 0.0) return -INFINITY;
  if (t == 0.0) return k == 1 ? k1 * std::log(a) + k2 * std::log(b) : -INFINITY;
  const double log_f = k1 == 0 ? 0.0 : kummer_1f1_scaled(k1, k, (b - a) * t, tol).log_abs();
  return k1 * std::log(a) + k2 * std::log(b) - b * t + (k - 1) * std::log(t) - log_gamma(k) + log_f;
}

double log_mixedexp_conv_kummer(const MixedExponential& f, int m, std::span<const GammaPairTerm> kernel, double t,
                                double tol) {
  require_valid(f);
  if (m < 0) throw DomainError("convolution power must be >= 0");
  LogSum sum;
  for (int r = 0; r <= m; ++r) {
    const double base = log_binomial(m, r) + r * std::log(f.p) + (m - r) * std::log(f.q());
    for (const auto& k : kernel)
      sum.add(base + std::log(k.weight) +
              log_gamma_pair_conv(r + k.alpha_shape, f.alpha, m - r + k.beta_shape, f.beta, t, tol));
  }
  return sum.log();
}

double mixedexp_conv_f1_kummer(const MixedExponential& f, int m, double t, double tol) {
  require_valid(f);
  if (m < 0) throw DomainError("convolution power must be >= 0");
  if (t <= 0.0) return 0.0;
  const double a = f.alpha;
  const double b = f.beta;
  const double p = f.p;
  const double q = f.q();
  const double z = (b - a) * t;
  const double common = -b * t + (m + 1) * std::log(t) - log_gamma(m + 2.0);
  LogSum first;
  LogSum second;
  for (int r = 0; r <= m; ++r) {
    const double w = log_binomial(m, r) + r * std::log(a * p) + (m - r) * std::log(b * q) + common;
    first.add(w + kummer_1f1_scaled(r + 2.0, m + 2.0, z, tol).log_abs());
    second.add(w + kummer_1f1_scaled(r, m + 2.0, z, tol).log_abs());
  }
  return p * a * first.value() + q * b * second.value();
}

double mixedexp_nfold_kummer(const MixedExponential& f, int m, double t, double tol) {
  if (m < 1) throw DomainError("mixedexp_nfold_kummer requires m >= 1");
  const GammaPairTerm unit{1.0, 0, 0};
  return std::exp(log_mixedexp_conv_kummer(f, m, std::span(&unit, 1), t, tol));
}

DensityGrid grid_convolve(const DensityGrid& a, const DensityGrid& b, std::size_t length) {
  if (a.t0 != 0.0 || b.t0 != 0.0) throw DomainError("grid_convolve: both grids must start at t = 0");
  if (!(a.dt > 0.0) || std::abs(a.dt - b.dt) > 1e-12 * a.dt) throw DomainError("grid_convolve: grids must share dt");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  if (na == 0 || nb == 0) throw DomainError("grid_convolve: empty grid");
  length = std::min(length, na + nb - 1);
  DensityGrid out{0.0, a.dt, std::vector<double>(length, 0.0)};
  const auto av = [&](std::size_t i) { return i < na ? a.values[i] : 0.0; };
  const auto bv = [&](std::size_t i) { return i < nb ? b.values[i] : 0.0; };
  for (std::size_t k = 1; k < length; ++k) {
    const std::size_t lo = k >= nb ? k - nb + 1 : 0;
    const std::size_t hi = std::min(k, na - 1);
    double s = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) s += a.values[i] * b.values[k - i];
    s -= 0.5 * (av(0) * bv(k) + av(k) * bv(0));
    out.values[k] = a.dt * s;
  }
  return out;
}

DensityGrid grid_convolve(const DensityGrid& a, const DensityGrid& b) {
  return grid_convolve(a, b, a.size() + b.size() - 1);
}

}  // namespace ruin
