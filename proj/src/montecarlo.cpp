#include "ruin/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "ruin/errors.hpp"
#include "ruin/quadrature.hpp"

namespace ruin {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed;
    const std::uint64_t mixed = splitmix64(sm) ^ stream;
    sm = mixed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on (0, 1]
  double open_uniform() { return static_cast<double>((operator()() >> 11) + 1) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

double exponential(Xoshiro256& rng, double rate) { return -std::log(rng.open_uniform()) / rate; }

double gamma_variate(Xoshiro256& rng, double shape, double rate) {
  if (const auto k = integer_shape(shape); k && *k <= 64) {
    double sum = 0.0;
    for (int i = 0; i < *k; ++i) sum += exponential(rng, rate);
    return sum;
  }
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

// Inverse CDF of the piecewise-linear density through the grid nodes.
class GridSampler {
 public:
  explicit GridSampler(const DensityGrid& grid) : grid_(grid), cdf_(grid.size(), 0.0) {
    if (grid.size() < 2) throw DomainError("tabulated sampler needs at least two grid points");
    for (std::size_t i = 1; i < grid.size(); ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * grid.dt * (grid.values[i - 1] + grid.values[i]);
    if (!(cdf_.back() > 0.0)) throw DomainError("tabulated sampler needs positive total mass");
  }

  double operator()(Xoshiro256& rng) const {
    const double target = (1.0 - rng.open_uniform()) * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cdf_.begin())) - 1;
    i = std::min(i, cdf_.size() - 2);
    const double f0 = grid_.values[i];
    const double f1 = grid_.values[i + 1];
    const double h = grid_.dt;
    const double need = target - cdf_[i];
    // f0 x + (f1 - f0) x^2 / (2h) = need on [0, h]
    const double slope = (f1 - f0) / h;
    double x;
    if (std::abs(slope) * h < 1e-12 * std::max(f0, 1e-300)) {
      x = f0 > 0.0 ? need / f0 : 0.0;
    } else {
      const double disc = std::max(0.0, f0 * f0 + 2.0 * slope * need);
      x = 2.0 * need / (f0 + std::sqrt(disc));
    }
    return grid_.time(i) + std::clamp(x, 0.0, h);
  }

 private:
  DensityGrid grid_;
  std::vector<double> cdf_;
};

struct Sampler {
  InterClaimFamily family;
  std::optional<GridSampler> family_grid;
  std::optional<GridSampler> delay_grid;
  enum class Delay { Ordinary, StationaryGamma, StationaryMixed, Grid, Fixed } delay = Delay::Ordinary;
  double fixed = 0.0;
  double mixed_alpha_weight = 0.0;

  double inter_claim(Xoshiro256& rng) const {
    if (const auto* g = std::get_if<GammaFamily>(&family)) return gamma_variate(rng, g->shape, g->rate);
    if (const auto* m = std::get_if<MixedExponential>(&family))
      return rng.open_uniform() <= m->p ? exponential(rng, m->alpha) : exponential(rng, m->beta);
    return (*family_grid)(rng);
  }

  double first(Xoshiro256& rng) const {
    switch (delay) {
      case Delay::Ordinary: return inter_claim(rng);
      case Delay::Fixed: return fixed;
      case Delay::Grid: return (*delay_grid)(rng);
      case Delay::StationaryGamma: {
        // equilibrium law of Gamma(n, b) is U * Gamma(n + 1, b)
        const auto& g = std::get<GammaFamily>(family);
        const double u = rng.open_uniform();
        return u * gamma_variate(rng, g.shape + 1.0, g.rate);
      }
      case Delay::StationaryMixed: {
        const auto& m = std::get<MixedExponential>(family);
        return rng.open_uniform() <= mixed_alpha_weight ? exponential(rng, m.alpha) : exponential(rng, m.beta);
      }
    }
    return 0.0;
  }
};

Sampler make_sampler(const Model& model, const SimConfig& sim) {
  Sampler s{model.family, std::nullopt, std::nullopt};
  if (const auto* t = std::get_if<TabulatedFamily>(&model.family)) s.family_grid.emplace(t->grid);
  if (sim.first_claim) {
    s.delay = Sampler::Delay::Fixed;
    s.fixed = *sim.first_claim;
  } else if (const auto* e = std::get_if<ExplicitDelay>(&model.delay)) {
    s.delay = Sampler::Delay::Grid;
    s.delay_grid.emplace(e->grid);
  } else if (std::holds_alternative<StationaryDelay>(model.delay)) {
    if (std::holds_alternative<GammaFamily>(model.family)) {
      s.delay = Sampler::Delay::StationaryGamma;
    } else if (const auto* m = std::get_if<MixedExponential>(&model.family)) {
      s.delay = Sampler::Delay::StationaryMixed;
      s.mixed_alpha_weight = (m->p / m->alpha) / moments(model.family).mean;
    } else {
      s.delay = Sampler::Delay::Grid;
      s.delay_grid.emplace(equilibrium_grid(std::get<TabulatedFamily>(model.family).grid));
    }
  }
  return s;
}

}  // namespace

void SimConfig::validate() const {
  if (n_paths < 1) throw DomainError("paths must be at least 1");
  if (n_paths > kMaxPaths) throw DomainError("paths must not exceed 1e9");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive and finite");
  if (!(bin_width > 0.0)) throw DomainError("bin-width must be positive");
  if (horizon / bin_width > 1e7) throw DomainError("horizon / bin-width exceeds 1e7 bins");
  if (threads < 1) throw DomainError("threads must be at least 1");
  if (first_claim && !(*first_claim >= 0.0)) throw DomainError("fixed first claim time must be >= 0");
}

double SimResult::bin_end(std::size_t k) const noexcept { return std::min(horizon, bin_width * (k + 1.0)); }

double SimResult::ruin_fraction() const noexcept {
  return n_paths == 0 ? 0.0 : static_cast<double>(ruined) / static_cast<double>(n_paths);
}

double SimResult::ruin_fraction_se() const noexcept {
  const double p = ruin_fraction();
  return n_paths == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(n_paths));
}

std::vector<double> SimResult::bin_standard_errors() const {
  std::vector<double> se(bins.size());
  const double n = static_cast<double>(n_paths);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double p = static_cast<double>(bins[k]) / n;
    se[k] = std::sqrt(p * (1.0 - p) / n);
  }
  return se;
}

SimResult simulate(const ModelParams& params, const InterClaimFamily& family, const DelaySpec& delay,
                   const SimConfig& sim) {
  sim.validate();
  const Model model = validate(params, family, delay);
  const Sampler sampler = make_sampler(model, sim);
  const auto n_bins = static_cast<std::size_t>(std::ceil(sim.horizon / sim.bin_width * (1.0 - 1e-12)));

  const double u = params.u;
  const double c = params.c;
  const double lambda = params.lambda;
  const auto run = [&](std::uint64_t begin, std::uint64_t end, std::vector<std::uint64_t>& bins) {
    std::uint64_t ruined = 0;
    for (std::uint64_t path = begin; path < end; ++path) {
      Xoshiro256 rng(sim.seed, path);
      double time = sampler.first(rng);
      double claims = 0.0;
      while (time <= sim.horizon) {
        claims += exponential(rng, lambda);
        if (u + c * time - claims < 0.0) {
          const auto k = std::min(n_bins - 1, static_cast<std::size_t>(time / sim.bin_width));
          ++bins[k];
          ++ruined;
          break;
        }
        time += sampler.inter_claim(rng);
      }
    }
    return ruined;
  };

  const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(sim.threads, sim.n_paths));
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(n_bins, 0));
  std::vector<std::uint64_t> ruined(workers, 0);
  std::vector<std::exception_ptr> failures(workers);
  const auto block = [&](std::uint64_t w) {
    const std::uint64_t begin = sim.n_paths * w / workers;
    const std::uint64_t end = sim.n_paths * (w + 1) / workers;
    try {
      ruined[w] = run(begin, end, partial[w]);
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    block(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(block, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : failures)
    if (e) std::rethrow_exception(e);

  SimResult result{sim.n_paths, sim.horizon, sim.bin_width, std::vector<std::uint64_t>(n_bins, 0), 0, 0};
  for (std::uint64_t w = 0; w < workers; ++w) {
    result.ruined += ruined[w];
    for (std::size_t k = 0; k < n_bins; ++k) result.bins[k] += partial[w][k];
  }
  result.survived = sim.n_paths - result.ruined;
  return result;
}

DensityComparison compare_to_density(const SimResult& result, const RuinDensity& density, double quad_tol) {
  DensityComparison out;
  const double n = static_cast<double>(result.n_paths);
  out.expected_mass.resize(result.bins.size());
  out.z.assign(result.bins.size(), 0.0);
  for (std::size_t k = 0; k < result.bins.size(); ++k) {
    const double mass = ruin_prob_between(density, result.bin_start(k), result.bin_end(k), quad_tol).value;
    out.expected_mass[k] = mass;
    const double expected = mass * n;
    if (expected < 10.0) continue;
    const double observed = static_cast<double>(result.bins[k]);
    const double sd = std::sqrt(expected * (1.0 - mass));
    if (sd > 0.0) out.z[k] = (observed - expected) / sd;
    out.max_abs_z = std::max(out.max_abs_z, std::abs(out.z[k]));
    out.chi_square += (observed - expected) * (observed - expected) / expected;
    ++out.chi_square_bins;
  }
  return out;
}

}  // namespace ruin
