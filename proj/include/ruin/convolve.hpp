#pragma once

#include <span>
#include <vector>

#include "ruin/model.hpp"

namespace ruin {

/// Sum over j of weights[j] * e(offset + j, beta; t), where e(m, beta; t) is
/// the Erlang(m) density with rate beta.
struct ErlangMixture {
  double beta = 1.0;
  int offset = 1;
  std::vector<double> weights;

  [[nodiscard]] double operator()(double t) const;
  /// Total integral (each Erlang density integrates to one).
  [[nodiscard]] double mass() const noexcept;
};

/// Which of f0 or f1(t) = t f0(t) a mixed convolution is taken against.
enum class DelayKernel { F0, F1 };

/// beta^m t^(m-1) exp(-beta t) / (m-1)!, evaluated in log space.
double erlang_density(int m, double beta, double t);
double log_erlang_density(int m, double beta, double t);

/// Gamma(shape, rate) density, and its log.
double gamma_density(double shape, double rate, double t);
double log_gamma_density(double shape, double rate, double t);

/// f^{*m}(t) for f = Gamma(n, beta): the Gamma(n m, beta) density.
/// Throws DomainError at t = 0 when n m < 1 (the density is infinite there).
double gamma_nfold(double n, double beta, int m, double t);

/// (f^{*m} * f1)(t) for the ordinary gamma model, f1(t) = t f(t); m = 0 gives f1.
double gamma_conv_f1_ordinary(double n, double beta, int m, double t);
double log_gamma_conv_f1_ordinary(double n, double beta, int m, double t);

/// (f^{*m} * f0)(t) or (f^{*m} * f1)(t) for Erlang(2, beta) inter-claim times
/// and a stationary (equilibrium) first claim.
double stationary_erlang2_conv(double beta, int m, double t, DelayKernel which);

/// gamma_{m,j} = q^m (1 - a/b)^j sum_r C(m,r) (r)_j / j! (a p / (b q))^r:
/// the Erlang(beta) expansion of the m-fold mixed-exponential convolution.
/// Truncated once the certified remaining weight is below coeff_tol.
ErlangMixture mixedexp_gamma_coeffs(const MixedExponential& f, int m, double coeff_tol);

/// eta_{i,m}: Erlang(beta) expansion of f^{*m} * f1 for the ordinary model,
/// offset m + 2, obtained by expanding each 1F1 term of the Kummer form.
ErlangMixture mixedexp_eta_coeffs(const MixedExponential& f, int m, double coeff_tol);

/// One component weight * (Gamma(alpha_shape, alpha) * Gamma(beta_shape, beta)),
/// a zero shape standing for the unit point mass at 0.
struct GammaPairTerm {
  double weight = 1.0;
  int alpha_shape = 0;
  int beta_shape = 0;
};

/// Erlang(beta) expansion of f^{*m} * k where k is a combination of gamma
/// pairs; all terms must share alpha_shape + beta_shape.
ErlangMixture mixedexp_conv_mixture(const MixedExponential& f, int m, std::span<const GammaPairTerm> kernel,
                                    double coeff_tol);

/// (Gamma(k1, a) * Gamma(k2, b))(t) = a^k1 b^k2 e^{-bt} t^{k1+k2-1} / Gamma(k1+k2) 1F1(k1; k1+k2; (b-a)t), in log space.
double log_gamma_pair_conv(int k1, double a, int k2, double b, double t, double tol);

/// log (f^{*m} * k)(t) through the 1F1 (Laplace transform) representation.
double log_mixedexp_conv_kummer(const MixedExponential& f, int m, std::span<const GammaPairTerm> kernel, double t,
                                double tol);

/// (f^{*m} * f1)(t) for the ordinary mixed-exponential model, as the two
/// binomial-weighted sums of 1F1(r+2; m+2; (beta-alpha)t) and 1F1(r; m+2; ...).
double mixedexp_conv_f1_kummer(const MixedExponential& f, int m, double t, double tol);

/// f^{*m}(t) for the mixed exponential through 1F1(r; m; (beta-alpha)t).
double mixedexp_nfold_kummer(const MixedExponential& f, int m, double t, double tol);

/// Trapezoid-rule convolution of two grids with equal dt starting at 0.
/// Output length is a.size() + b.size() - 1.
DensityGrid grid_convolve(const DensityGrid& a, const DensityGrid& b);

/// Same, keeping only the first `length` output nodes (O(length * min(len))).
DensityGrid grid_convolve(const DensityGrid& a, const DensityGrid& b, std::size_t length);

}  // namespace ruin
