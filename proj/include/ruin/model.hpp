#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ruin {

/// Uniformly spaced samples of a nonnegative function on [t0, t0 + (n-1) dt].
/// Between nodes the function is the linear interpolant; outside it is zero.
struct DensityGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] double time(std::size_t i) const noexcept { return t0 + dt * static_cast<double>(i); }
  [[nodiscard]] double end() const noexcept;
  [[nodiscard]] double at(double t) const noexcept;
  /// Trapezoid integral over the whole grid.
  [[nodiscard]] double integral() const noexcept;
  /// Checks spacing/finiteness/nonnegativity; throws DomainError naming the problem.
  void validate(const std::string& what) const;
};

/// Surplus u, premium rate c and the rate lambda of the exponential claim sizes.
struct ModelParams {
  double u = 0.0;
  double c = 1.0;
  double lambda = 1.0;
};

struct GammaFamily {
  double shape = 1.0;
  double rate = 1.0;
};

/// Density p*alpha*exp(-alpha t) + q*beta*exp(-beta t), q = 1 - p, beta > alpha.
struct MixedExponential {
  double p = 0.5;
  double alpha = 1.0;
  double beta = 2.0;

  [[nodiscard]] double q() const noexcept { return 1.0 - p; }
};

struct TabulatedFamily {
  DensityGrid grid;
};

using InterClaimFamily = std::variant<GammaFamily, MixedExponential, TabulatedFamily>;

struct OrdinaryDelay {};
struct StationaryDelay {};
struct ExplicitDelay {
  DensityGrid grid;
};

/// Law of the first inter-claim time T0.
using DelaySpec = std::variant<OrdinaryDelay, StationaryDelay, ExplicitDelay>;

struct SeriesConfig {
  double tol = 1e-12;
  int max_terms = 10'000;
  double coeff_tol = 1e-14;
  double grid_dt = 1e-3;

  void validate() const;
};

/// A parameter set that passed validation.
struct Model {
  ModelParams params;
  InterClaimFamily family;
  DelaySpec delay;
  /// c E[T1] > 1/lambda. When false ruin is certain but all densities stay valid.
  bool net_profit = true;
  std::vector<std::string> warnings;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Tolerance on |integral - 1| accepted for tabulated densities.
inline constexpr double kGridMassTolerance = 1e-4;

Model validate(const ModelParams& params, const InterClaimFamily& family, const DelaySpec& delay);

void validate_params(const ModelParams& params);
void validate_family(const InterClaimFamily& family);

Moments moments(const InterClaimFamily& family);

/// f(t), the inter-claim density of T1.
double family_density(const InterClaimFamily& family, double t);

/// 1 - F(t).
double family_survival(const InterClaimFamily& family, double t);

/// f0(t), the density of T0 under the given delay.
double delay_density(const InterClaimFamily& family, const DelaySpec& delay, double t);

/// Returns k when shape is (numerically) a positive integer.
std::optional<int> integer_shape(double shape);

/// Equilibrium density (1 - F(t)) / mean of a tabulated density, on the same nodes.
DensityGrid equilibrium_grid(const DensityGrid& density);

/// Pads a grid that starts at a multiple of dt with leading zeros so it starts at 0.
DensityGrid anchored_at_zero(const DensityGrid& grid);

std::string family_name(const InterClaimFamily& family);
std::string delay_name(const DelaySpec& delay);

}  // namespace ruin
