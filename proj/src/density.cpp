#include "ruin/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ruin/errors.hpp"
#include "ruin/specfun.hpp"

namespace ruin {

namespace {

// log(tol * min(1, value)), floored so an underflowed value cannot stall truncation
double log_target(double tol, double log_value) {
  return std::log(tol) + std::max(std::min(0.0, log_value), -700.0);
}

// log(x e^a + y e^b) for x, y >= 0
double log_combination(double x, double a, double y, double b) {
  LogSum s;
  if (x > 0.0) s.add(std::log(x) + a);
  if (y > 0.0) s.add(std::log(y) + b);
  return s.log();
}

}  // namespace

std::string_view to_string(DensityPath path) {
  switch (path) {
    case DensityPath::Auto: return "auto";
    case DensityPath::GenericSeries: return "generic";
    case DensityPath::ClosedForm: return "closed";
  }
  return "unknown";
}

RuinDensity::RuinDensity(const DensityQuery& query)
    : model_(validate(query.params, query.family, query.delay)), cfg_(query.cfg), path_(query.path) {
  cfg_.validate();
  const auto* gamma = std::get_if<GammaFamily>(&model_.family);
  const bool mixed = std::holds_alternative<MixedExponential>(model_.family);
  const bool ordinary = std::holds_alternative<OrdinaryDelay>(model_.delay);
  const bool stationary = std::holds_alternative<StationaryDelay>(model_.delay);
  const std::optional<int> k = gamma ? integer_shape(gamma->shape) : std::nullopt;

  const auto generic_kind = [&] {
    if (gamma && ordinary) return SourceKind::GammaClosedForm;
    if (gamma && stationary && k) return SourceKind::GammaStationaryErlang;
    if (gamma && stationary) return SourceKind::GammaStationaryIncomplete;
    if (mixed && (ordinary || stationary)) return SourceKind::MixedExpKummer;
    return SourceKind::Grid;
  };

  SourceKind kind = SourceKind::Grid;
  switch (path_) {
    case DensityPath::ClosedForm:
      if (k && ordinary) {
        method_ = Method::ErlangHypergeometric;
        erlang_order_ = *k;
        kind = SourceKind::GammaClosedForm;
      } else if (k && *k == 2 && stationary) {
        method_ = Method::StationaryErlang2Hypergeometric;
        kind = SourceKind::GammaStationaryErlang;
      } else if (mixed && ordinary) {
        kind = SourceKind::MixedExpErlangMixture;
      } else {
        throw UnsupportedError("no closed form for family " + family_name(model_.family) + " with delay " +
                               delay_name(model_.delay));
      }
      break;
    case DensityPath::GenericSeries:
      kind = generic_kind();
      break;
    case DensityPath::Auto:
      if (k && ordinary) {
        method_ = Method::ErlangHypergeometric;
        erlang_order_ = *k;
        kind = SourceKind::GammaClosedForm;
      } else if (k && *k == 2 && stationary) {
        method_ = Method::StationaryErlang2Hypergeometric;
        kind = SourceKind::GammaStationaryErlang;
      } else if (mixed && (ordinary || stationary)) {
        kind = SourceKind::MixedExpErlangMixture;
      } else {
        kind = generic_kind();
      }
      break;
  }
  source_ = make_source(kind, model_, cfg_);
}

std::string_view RuinDensity::method() const noexcept {
  switch (method_) {
    case Method::ErlangHypergeometric: return "erlang-hypergeometric";
    case Method::StationaryErlang2Hypergeometric: return "stationary-erlang2-hypergeometric";
    case Method::Series: return source_->name();
  }
  return "unknown";
}

double RuinDensity::small_time_exponent() const noexcept {
  if (const auto* g = std::get_if<GammaFamily>(&model_.family))
    if (std::holds_alternative<OrdinaryDelay>(model_.delay)) return g->shape;
  return 1.0;
}

double RuinDensity::density_at(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("ruin-time density is defined for t > 0");
  const auto& p = model_.params;
  switch (method_) {
    case Method::ErlangHypergeometric:
      return erlang_closed_form(p, erlang_order_, std::get<GammaFamily>(model_.family).rate, t, cfg_.tol);
    case Method::StationaryErlang2Hypergeometric:
      return stationary_erlang2_closed_form(p, std::get<GammaFamily>(model_.family).rate, t, cfg_.tol);
    case Method::Series:
      break;
  }
  return series_density(t);
}

double RuinDensity::series_density(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("ruin-time density is defined for t > 0");
  const auto& p = model_.params;
  const double s = p.u + p.c * t;
  const double L = p.lambda * s;
  const double log_L = std::log(L);
  const double log_s = std::log(s);
  const double log_bound = source_->log_nfold_bound();
  const int bound_from = source_->bound_from();

  LogSum total;
  total.add(-L + source_->log_f0(t));
  const LogSequence conv_f0 = source_->conv_f0(t);
  const LogSequence conv_f1 = source_->conv_f1(t);
  for (int n = 1; n <= cfg_.max_terms; ++n) {
    const double log_w = n * log_L - log_gamma(n + 1.0) - L;
    total.add(log_w + log_combination(p.u, conv_f0(n), p.c, conv_f1(n)) - log_s);
    if (n >= bound_from && n + 2.0 > L) {
      const double log_tail = log_w + log_L - std::log(n + 1.0) - std::log1p(-L / (n + 2.0)) + log_bound;
      if (log_tail <= log_target(cfg_.tol, total.log())) return std::exp(total.log());
    }
  }
  throw NumericError("ruin density series not truncated within max_terms = " + std::to_string(cfg_.max_terms) +
                     " at t = " + std::to_string(t));
}

double RuinDensity::log_poisson_nfold(double L, double y) const {
  const double log_L = std::log(L);
  const double log_bound = source_->log_nfold_bound();
  const int bound_from = source_->bound_from();
  const LogSequence nfold = source_->nfold(y);
  LogSum total;
  for (int n = 1; n <= cfg_.max_terms; ++n) {
    const double log_w = n * log_L - log_gamma(n + 1.0) - L;
    total.add(log_w + nfold(n));
    if (n >= bound_from && n + 2.0 > L) {
      const double log_tail = log_w + log_L - std::log(n + 1.0) - std::log1p(-L / (n + 2.0)) + log_bound;
      if (log_tail <= log_target(cfg_.tol, total.log())) return total.log();
    }
  }
  throw NumericError("conditional density series not truncated within max_terms = " +
                     std::to_string(cfg_.max_terms));
}

double RuinDensity::conditional_density(double v, double t) const {
  if (!(v >= 0.0) || !std::isfinite(t)) throw DomainError("conditional density requires v >= 0 and finite t");
  if (!(t > v)) throw DomainError("conditional density requires t > v (ruin strictly after the first claim time)");
  const auto& p = model_.params;
  const double s = p.u + p.c * t;
  const double start = p.u + p.c * v;
  if (start == 0.0) return 0.0;
  return std::exp(std::log(start) - std::log(s) + log_poisson_nfold(p.lambda * s, t - v));
}

double RuinDensity::kendall_sigma_density(double v, double s) const {
  const auto& p = model_.params;
  if (!(v > 0.0)) throw DomainError("Kendall density requires v > 0");
  if (!(s > p.u + p.c * v) || !std::isfinite(s)) throw DomainError("Kendall density is supported on s > u + c v");
  const double level = v + p.u / p.c;
  const double y = (s - p.u) / p.c - v;
  return std::exp(std::log(level) - std::log(s) + log_poisson_nfold(p.lambda * s, y));
}

double density_at(const DensityQuery& query, double t) { return RuinDensity(query).density_at(t); }

double erlang_closed_form(const ModelParams& params, int n, double beta, double t, double tol) {
  validate_params(params);
  if (n < 1) throw DomainError("Erlang closed form requires an integer shape n >= 1");
  if (!(beta > 0.0)) throw DomainError("Erlang closed form requires beta > 0");
  if (!(t > 0.0)) throw DomainError("ruin-time density is defined for t > 0");
  const double s = params.u + params.c * t;
  const double L = params.lambda * s;
  const double log_bt = std::log(beta * t);
  const double z = std::exp(std::log(L) + n * log_bt - n * std::log(static_cast<double>(n)));

  std::vector<double> lower(n);
  std::vector<double> upper(n);
  for (int k = 0; k < n; ++k) {
    lower[k] = 1.0 + static_cast<double>(k) / n;
    upper[k] = 1.0 + static_cast<double>(k + 1) / n;
  }
  const double log_front = std::log(beta) - L - beta * t - std::log(s) + (n - 1) * log_bt - log_gamma(n);
  LogSum sum;
  if (params.u > 0.0) sum.add(std::log(params.u) + pfq_scaled({{}, lower, z}, tol).log_abs());
  sum.add(std::log(params.c * t) + pfq_scaled({{}, upper, z}, tol).log_abs());
  return std::exp(log_front + sum.log());
}

double gamma_series_form(const ModelParams& params, double n, double beta, double t, const SeriesConfig& cfg) {
  validate_params(params);
  if (!(n > 0.0) || !(beta > 0.0)) throw DomainError("gamma series form requires n > 0 and beta > 0");
  if (!(t > 0.0)) throw DomainError("ruin-time density is defined for t > 0");
  const double s = params.u + params.c * t;
  const double L = params.lambda * s;
  const double log_x = std::log(L) + n * std::log(beta * t);  // log of L (beta t)^n
  const double log_common = -L - beta * t - std::log(s);

  // sum_m x^m / (m! Gamma(n(m+1) + shift)); the term ratio is decreasing in m
  const auto series = [&](double shift, double log_front) {
    const auto log_term = [&](int m) { return m * log_x - log_gamma(m + 1.0) - log_gamma(n * (m + 1) + shift); };
    LogSum sum;
    for (int m = 0; m < cfg.max_terms; ++m) {
      const double lt = log_term(m);
      sum.add(lt);
      const double log_ratio = log_term(m + 1) - lt;
      if (log_ratio < 0.0) {
        const double r = std::exp(log_ratio);
        const double log_tail = lt + log_ratio - std::log1p(-r);
        if (log_front + log_tail <= log_target(cfg.tol, log_front + sum.log())) return log_front + sum.log();
      }
    }
    throw NumericError("gamma series form not truncated within max_terms");
  };

  LogSum total;
  if (params.u > 0.0)
    total.add(series(0.0, std::log(params.u * beta) + (n - 1.0) * std::log(beta * t) + log_common));
  total.add(series(1.0, std::log(params.c * n) + n * std::log(beta * t) + log_common));
  return std::exp(total.log());
}

double stationary_erlang2_closed_form(const ModelParams& params, double beta, double t, double tol) {
  validate_params(params);
  if (!(beta > 0.0)) throw DomainError("stationary Erlang(2) closed form requires beta > 0");
  if (!(t > 0.0)) throw DomainError("ruin-time density is defined for t > 0");
  const double u = params.u;
  const double c = params.c;
  const double s = u + c * t;
  const double L = params.lambda * s;
  const double w = L * (beta * t) * (beta * t) / 4.0;
  const double log_front = std::log(beta) - L - beta * t - std::log(2.0 * s);
  LogSum sum;
  if (u > 0.0) sum.add(std::log(u) + pfq_scaled({{}, {0.5, 1.0}, w}, tol).log_abs());
  sum.add(std::log(t * (beta * u + c)) + pfq_scaled({{}, {1.0, 1.5}, w}, tol).log_abs());
  sum.add(std::log(c * beta * t * t) + pfq_scaled({{}, {1.5, 2.0}, w}, tol).log_abs());
  return std::exp(log_front + sum.log());
}

double conditional_density(const ModelParams& params, const InterClaimFamily& family, double v, double t,
                           const SeriesConfig& cfg) {
  return RuinDensity({params, family, OrdinaryDelay{}, cfg, DensityPath::Auto}).conditional_density(v, t);
}

double kendall_sigma_density(const KendallQuery& query, const SeriesConfig& cfg) {
  return RuinDensity({query.params, query.family, OrdinaryDelay{}, cfg, DensityPath::Auto})
      .kendall_sigma_density(query.v, query.s);
}

}  // namespace ruin
