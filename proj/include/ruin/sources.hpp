#pragma once

#include <functional>
#include <memory>
#include <string_view>

#include "ruin/model.hpp"

namespace ruin {

/// n -> log g_n(x) at a fixed point x, for n = 1, 2, ...
using LogSequence = std::function<double(int)>;

/// Ingredients of the ruin-time series for one (family, delay) pair:
/// f0, (f^{*n} * f0)(t), (f^{*n} * f1)(t) with f1(t) = t f0(t), and f^{*n}(y),
/// all returned as logarithms (-inf for zero).
///
/// Implementations may cache coefficient tables internally; every method is
/// safe to call concurrently and gives results independent of call order.
class ConvolutionSource {
 public:
  virtual ~ConvolutionSource() = default;

  [[nodiscard]] virtual double log_f0(double t) const = 0;
  [[nodiscard]] virtual LogSequence conv_f0(double t) const = 0;
  [[nodiscard]] virtual LogSequence conv_f1(double t) const = 0;
  [[nodiscard]] virtual LogSequence nfold(double y) const = 0;

  /// log of a uniform bound on f^{*n}, valid for every n >= bound_from().
  /// Since f^{*n} * f0 <= sup f^{*n} and f^{*n} * f1 <= t (f^{*n} * f0) it also
  /// bounds the series terms.
  [[nodiscard]] virtual double log_nfold_bound() const = 0;
  [[nodiscard]] virtual int bound_from() const = 0;
  [[nodiscard]] virtual std::string_view name() const = 0;
};

enum class SourceKind {
  GammaClosedForm,        // gamma convolution formulas, ordinary delay, any shape
  GammaStationaryErlang,  // integer shape, stationary delay: finite Erlang sums
  MixedExpErlangMixture,  // gamma/eta coefficient expansions (ordinary or stationary)
  MixedExpKummer,         // binomial sums of 1F1 terms (ordinary or stationary)
  GammaStationaryIncomplete,  // any shape, stationary delay: incomplete gamma differences
  Grid,                   // numeric trapezoid convolutions on a uniform grid
};

std::string_view to_string(SourceKind kind);

/// Throws UnsupportedError when the source cannot represent the model.
std::shared_ptr<const ConvolutionSource> make_source(SourceKind kind, const Model& model, const SeriesConfig& cfg);

}  // namespace ruin
