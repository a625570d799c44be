#pragma once

#include <functional>

#include "ruin/density.hpp"
#include "ruin/model.hpp"

namespace ruin {

struct QuadratureResult {
  double value = 0.0;
  /// Sum over the final panels of |Kronrod - Gauss|.
  double abs_error_estimate = 0.0;
  long evaluations = 0;
  int panels = 0;
};

inline constexpr int kMaxQuadraturePanels = 4000;

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
/// Bisects the panel with the largest error until the summed estimate is
/// <= abs_tol. Panels are summed in left-to-right order, so the result does
/// not depend on the order in which panels were refined.
/// Throws QuadratureError when max_panels is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           int max_panels = kMaxQuadraturePanels);

struct RuinProbResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
};

inline constexpr double kDefaultQuadTol = 1e-8;

/// psi(u, t) = integral of the ruin-time density over (0, t].
RuinProbResult ruin_prob(const RuinDensity& density, double t, double quad_tol = kDefaultQuadTol);
RuinProbResult ruin_prob(const DensityQuery& query, double t, double quad_tol = kDefaultQuadTol);

/// P(a < tau <= b).
RuinProbResult ruin_prob_between(const RuinDensity& density, double a, double b, double quad_tol = kDefaultQuadTol);

/// p(t) at t = dt, 2 dt, ..., up to t_max (t0 = dt). Points are split across
/// `threads` workers; each value is computed independently, so the grid is the
/// same for any thread count.
DensityGrid tabulate_density(const RuinDensity& density, double t_max, double dt, int threads = 1);
DensityGrid tabulate_density(const DensityQuery& query, double t_max, double dt, int threads = 1);

/// Laplace transform E[exp(-s T1)].
double laplace_transform(const InterClaimFamily& family, double s);

/// R in (0, lambda) with lambda L_f(c R) = lambda - R (ordinary renewal claims).
/// Throws DomainError when the net profit condition fails (no positive root).
double adjustment_coefficient(const ModelParams& params, const InterClaimFamily& family);

/// Ultimate ruin probability (1 - R/lambda) exp(-R u) for the ordinary model.
double lundberg_ultimate(const ModelParams& params, const InterClaimFamily& family);

}  // namespace ruin
