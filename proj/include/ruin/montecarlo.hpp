#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ruin/density.hpp"
#include "ruin/model.hpp"

namespace ruin {

inline constexpr std::uint64_t kMaxPaths = 1'000'000'000;
inline constexpr std::string_view kRngAlgorithm = "xoshiro256** seeded per path by splitmix64(seed, path)";

struct SimConfig {
  std::uint64_t n_paths = 100'000;
  double horizon = 20.0;
  std::uint64_t seed = 1;
  double bin_width = 0.5;
  int threads = 1;
  /// When set, T0 is this constant instead of a draw from the delay law.
  std::optional<double> first_claim;

  void validate() const;
};

struct SimResult {
  std::uint64_t n_paths = 0;
  double horizon = 0.0;
  double bin_width = 0.0;
  /// Ruin-time counts on [k w, (k+1) w) clipped to the horizon.
  std::vector<std::uint64_t> bins;
  std::uint64_t ruined = 0;
  std::uint64_t survived = 0;

  [[nodiscard]] double bin_start(std::size_t k) const noexcept { return bin_width * static_cast<double>(k); }
  [[nodiscard]] double bin_end(std::size_t k) const noexcept;
  [[nodiscard]] double ruin_fraction() const noexcept;
  /// Binomial standard error of ruin_fraction().
  [[nodiscard]] double ruin_fraction_se() const noexcept;
  /// sqrt(p (1 - p) / n) for the empirical probability p of each bin.
  [[nodiscard]] std::vector<double> bin_standard_errors() const;
};

/// Simulates the surplus u + c t - sum X_j at claim epochs up to the horizon.
/// Each path has its own generator, so the result does not depend on threads.
SimResult simulate(const ModelParams& params, const InterClaimFamily& family, const DelaySpec& delay,
                   const SimConfig& sim);

struct DensityComparison {
  std::vector<double> expected_mass;
  std::vector<double> z;
  double max_abs_z = 0.0;
  double chi_square = 0.0;
  int chi_square_bins = 0;
};

/// Bin-by-bin comparison of a histogram with the analytic density. Bins whose
/// expected count is below 10 get z = 0 and are left out of the chi-square.
DensityComparison compare_to_density(const SimResult& result, const RuinDensity& density,
                                     double quad_tol = 1e-9);

}  // namespace ruin
