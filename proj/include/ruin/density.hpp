#pragma once

#include <memory>
#include <string_view>

#include "ruin/model.hpp"
#include "ruin/sources.hpp"

namespace ruin {

enum class DensityPath { Auto, GenericSeries, ClosedForm };

std::string_view to_string(DensityPath path);

/// Everything needed to evaluate the ruin-time density.
///
/// ClosedForm is available for (integer gamma shape, ordinary),
/// (gamma shape 2, stationary) and (mixed exponential, ordinary).
struct DensityQuery {
  ModelParams params;
  InterClaimFamily family;
  DelaySpec delay;
  SeriesConfig cfg;
  DensityPath path = DensityPath::Auto;
};

/// Evaluator for the defective density of the ruin time tau,
///
///   p(t) = e^{-L} { f0(t) + sum_{n>=1} L^n / (n! (u+ct)) [u (f^{*n}*f0)(t) + c (f^{*n}*f1)(t)] },
///
/// with L = lambda (u + c t) and f1(t) = t f0(t), together with the density of
/// tau given T0 = v and the crossing-time density of the time-swapped process.
///
/// Construction validates the query and picks the evaluation route once;
/// evaluation is thread-safe (coefficient tables are cached under a lock).
class RuinDensity {
 public:
  explicit RuinDensity(const DensityQuery& query);

  /// p(t) for t > 0.
  [[nodiscard]] double density_at(double t) const;
  [[nodiscard]] double operator()(double t) const { return density_at(t); }

  /// p(t | T0 = v) = (u + c v)/(u + c t) e^{-L} sum_{n>=1} L^n/n! f^{*n}(t - v), for t > v >= 0.
  /// Ruin at the first claim is an atom of the conditional law and is not included.
  [[nodiscard]] double conditional_density(double v, double t) const;

  /// Density at s > u + c v of the first time sigma the process
  /// Z(s) = (compound Poisson sum of inter-claim times) - s/c reaches -(v + u/c).
  [[nodiscard]] double kendall_sigma_density(double v, double s) const;

  /// p(t) by the series above with the route's convolution source, whatever the path.
  [[nodiscard]] double series_density(double t) const;

  [[nodiscard]] const Model& model() const noexcept { return model_; }
  [[nodiscard]] const SeriesConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] DensityPath path() const noexcept { return path_; }
  /// Human-readable name of the evaluation route actually used.
  [[nodiscard]] std::string_view method() const noexcept;
  [[nodiscard]] const ConvolutionSource& source() const noexcept { return *source_; }

  /// a such that p(t) behaves like t^(a-1) near 0 (a < 1 means integrable singularity).
  [[nodiscard]] double small_time_exponent() const noexcept;

 private:
  enum class Method { ErlangHypergeometric, StationaryErlang2Hypergeometric, Series };

  // log of e^{-L} sum_{n>=1} L^n/n! f^{*n}(y)
  [[nodiscard]] double log_poisson_nfold(double L, double y) const;

  Model model_;
  SeriesConfig cfg_;
  DensityPath path_;
  Method method_ = Method::Series;
  int erlang_order_ = 0;
  std::shared_ptr<const ConvolutionSource> source_;
};

double density_at(const DensityQuery& query, double t);

/// Ordinary Erlang(n, beta) model through two 0F_n functions of
/// Z = L (beta t)^n / n^n.
double erlang_closed_form(const ModelParams& params, int n, double beta, double t, double tol);

/// Ordinary Gamma(n, beta) model, any real n > 0, as two power series in
/// L (beta t)^n with Gamma(n(m+1)) and Gamma(n(m+1)+1) denominators.
double gamma_series_form(const ModelParams& params, double n, double beta, double t, const SeriesConfig& cfg);

/// Erlang(2, beta) inter-claim times with a stationary first claim, through
/// three 0F2 functions of W = L (beta t)^2 / 4.
double stationary_erlang2_closed_form(const ModelParams& params, double beta, double t, double tol);

/// Convenience wrappers building an ordinary-delay evaluator.
double conditional_density(const ModelParams& params, const InterClaimFamily& family, double v, double t,
                           const SeriesConfig& cfg = {});

struct KendallQuery {
  ModelParams params;
  InterClaimFamily family;
  double v = 0.0;  // first inter-claim time
  double s = 0.0;  // transformed time, s > u + c v
};

double kendall_sigma_density(const KendallQuery& query, const SeriesConfig& cfg = {});

}  // namespace ruin
