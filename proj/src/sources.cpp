#include "ruin/sources.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "ruin/convolve.hpp"
#include "ruin/errors.hpp"
#include "ruin/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>

namespace ruin {

namespace {

constexpr double kSeriesTol = 1e-15;

double log_or_neg_inf(double x) { return x > 0.0 ? std::log(x) : -INFINITY; }

// sup of the Gamma(shape >= 1, rate) density, attained at the mode
double log_gamma_sup(double shape, double rate) {
  if (shape <= 1.0) return std::log(rate);
  return log_gamma_density(shape, rate, (shape - 1.0) / rate);
}

class GammaClosedSource final : public ConvolutionSource {
 public:
  explicit GammaClosedSource(GammaFamily g) : g_(g) {}

  double log_f0(double t) const override { return log_gamma_density(g_.shape, g_.rate, t); }

  LogSequence conv_f0(double t) const override {
    return [g = g_, t](int n) { return log_gamma_density(g.shape * (n + 1), g.rate, t); };
  }

  LogSequence conv_f1(double t) const override {
    return [g = g_, t](int n) { return log_gamma_conv_f1_ordinary(g.shape, g.rate, n, t); };
  }

  LogSequence nfold(double y) const override {
    return [g = g_, y](int n) { return log_gamma_density(g.shape * n, g.rate, y); };
  }

  double log_nfold_bound() const override { return log_gamma_sup(g_.shape * bound_from(), g_.rate); }
  int bound_from() const override { return static_cast<int>(std::ceil(1.0 / g_.shape - 1e-12)); }
  std::string_view name() const override { return to_string(SourceKind::GammaClosedForm); }

 private:
  GammaFamily g_;
};

// Stationary gamma delay, any shape a: f0 = (beta/a) Q(a, beta t) and the
// convolutions reduce to differences of regularized incomplete gamma functions,
//   f^{*n} * f0 = (beta/a) [P(na) - P(na + a)],
//   f^{*n} * f1 = (beta/a) [t (P(na) - P(na + a)) - (na/beta) (P(na + 1) - P(na + a + 1))].
class GammaStationaryIncompleteSource final : public ConvolutionSource {
 public:
  explicit GammaStationaryIncompleteSource(GammaFamily g) : g_(g) {}

  double log_f0(double t) const override { return log_or_neg_inf(term_f0(g_, 0, t)); }

  LogSequence conv_f0(double t) const override {
    return [g = g_, t](int n) { return log_or_neg_inf(term_f0(g, n, t)); };
  }

  LogSequence conv_f1(double t) const override {
    return [g = g_, t](int n) { return log_or_neg_inf(term_f1(g, n, t)); };
  }

  LogSequence nfold(double y) const override {
    return [g = g_, y](int n) { return log_gamma_density(g.shape * n, g.rate, y); };
  }

  double log_nfold_bound() const override { return log_gamma_sup(g_.shape * bound_from(), g_.rate); }
  int bound_from() const override { return static_cast<int>(std::ceil(1.0 / g_.shape - 1e-12)); }
  std::string_view name() const override { return to_string(SourceKind::GammaStationaryIncomplete); }

 private:
  // P(c, x) - P(c + a, x), taken from the side that avoids cancellation near 1
  static double p_gap(double c, double a, double x) {
    if (x <= 0.0) return 0.0;
    if (c == 0.0) return boost::math::gamma_q(a, x);
    if (x < c) return boost::math::gamma_p(c, x) - boost::math::gamma_p(c + a, x);
    return boost::math::gamma_q(c + a, x) - boost::math::gamma_q(c, x);
  }

  static double term_f0(GammaFamily g, int n, double t) {
    return std::max(0.0, g.rate / g.shape * p_gap(g.shape * n, g.shape, g.rate * t));
  }

  static double term_f1(GammaFamily g, int n, double t) {
    const double c = g.shape * n;
    const double x = g.rate * t;
    double v = t * p_gap(c, g.shape, x);
    if (n > 0) v -= c / g.rate * p_gap(c + 1.0, g.shape, x);
    return std::max(0.0, g.rate / g.shape * v);
  }

  GammaFamily g_;
};

// Equilibrium density of Erlang(k, beta) is the uniform mixture of e(1..k, beta).
class GammaStationaryErlangSource final : public ConvolutionSource {
 public:
  GammaStationaryErlangSource(int k, double beta) : k_(k), beta_(beta) {}

  double log_f0(double t) const override { return std::log(term_f0(0, t)); }

  LogSequence conv_f0(double t) const override {
    return [this, t](int n) { return log_or_neg_inf(term_f0(n, t)); };
  }

  LogSequence conv_f1(double t) const override {
    return [this, t](int n) { return log_or_neg_inf(term_f1(n, t)); };
  }

  LogSequence nfold(double y) const override {
    return [k = k_, beta = beta_, y](int n) { return log_erlang_density(k * n, beta, y); };
  }

  double log_nfold_bound() const override { return log_gamma_sup(k_, beta_); }
  int bound_from() const override { return 1; }
  std::string_view name() const override { return to_string(SourceKind::GammaStationaryErlang); }

 private:
  double term_f0(int n, double t) const {
    if (k_ == 2) return stationary_erlang2_conv(beta_, n, t, DelayKernel::F0);
    double s = 0.0;
    for (int i = 1; i <= k_; ++i) s += erlang_density(n * k_ + i, beta_, t);
    return s / k_;
  }

  double term_f1(int n, double t) const {
    if (k_ == 2) return stationary_erlang2_conv(beta_, n, t, DelayKernel::F1);
    double s = 0.0;
    for (int i = 1; i <= k_; ++i) s += i / beta_ * erlang_density(n * k_ + i + 1, beta_, t);
    return s / k_;
  }

  int k_;
  double beta_;
};

// Lazily grown table of mixtures indexed by n.
class MixtureRows {
 public:
  using Factory = std::function<ErlangMixture(int)>;
  explicit MixtureRows(Factory make) : make_(std::move(make)) {}

  std::shared_ptr<const ErlangMixture> get(int n) const {
    std::lock_guard lock(mu_);
    if (rows_.size() <= static_cast<std::size_t>(n)) rows_.resize(static_cast<std::size_t>(n) + 1);
    auto& slot = rows_[static_cast<std::size_t>(n)];
    if (!slot) slot = std::make_shared<const ErlangMixture>(make_(n));
    return slot;
  }

 private:
  Factory make_;
  mutable std::mutex mu_;
  mutable std::vector<std::shared_ptr<const ErlangMixture>> rows_;
};

// log e(k, beta; t) for k = 1, 2, ..., grown on demand, plus exp(log e - ref)
// with ref the log-density at the modal order, so a mixture row is a dot product.
class ErlangBasis {
 public:
  ErlangBasis(double beta, double t) : beta_(beta), t_(t) {
    if (t > 0.0) {
      log_bt_ = std::log(beta * t);
      const double mode = std::max(1.0, std::floor(beta * t) + 1.0);
      ref_ = log_gamma_density(mode, beta, t);
    }
  }

  double log_mixture(const ErlangMixture& row) {
    if (t_ <= 0.0) return row.offset == 1 && !row.weights.empty() ? std::log(row.weights[0] * beta_) : -INFINITY;
    const std::size_t last = static_cast<std::size_t>(row.offset) + row.weights.size() - 1;
    extend(last);
    double s = 0.0;
    for (std::size_t j = 0; j < row.weights.size(); ++j) s += row.weights[j] * scaled_[row.offset + j - 1];
    if (s > 1e-250) return std::log(s) + ref_;
    LogSum slow;
    for (std::size_t j = 0; j < row.weights.size(); ++j)
      if (row.weights[j] > 0.0) slow.add(std::log(row.weights[j]) + log_e_[row.offset + j - 1]);
    return slow.log();
  }

 private:
  void extend(std::size_t k_max) {
    if (log_e_.empty()) {
      log_e_.push_back(std::log(beta_) - beta_ * t_);
      scaled_.push_back(std::exp(log_e_.back() - ref_));
    }
    while (log_e_.size() < k_max) {
      const double k = static_cast<double>(log_e_.size());
      log_e_.push_back(log_e_.back() + log_bt_ - std::log(k));
      scaled_.push_back(std::exp(log_e_.back() - ref_));
    }
  }

  double beta_;
  double t_;
  double log_bt_ = 0.0;
  double ref_ = 0.0;
  std::vector<double> log_e_;
  std::vector<double> scaled_;
};

class MixedExpMixtureSource final : public ConvolutionSource {
 public:
  MixedExpMixtureSource(const Model& model, double coeff_tol)
      : f_(std::get<MixedExponential>(model.family)),
        family_(model.family),
        delay_(model.delay),
        nfold_rows_([f = f_, coeff_tol](int n) { return mixedexp_gamma_coeffs(f, n, coeff_tol); }),
        f0_rows_(make_f0(model, coeff_tol)),
        f1_rows_(make_f1(model, coeff_tol)) {}

  double log_f0(double t) const override { return log_or_neg_inf(delay_density(family_, delay_, t)); }

  LogSequence conv_f0(double t) const override {
    auto basis = std::make_shared<ErlangBasis>(f_.beta, t);
    const bool ordinary = std::holds_alternative<OrdinaryDelay>(delay_);
    return [this, basis, ordinary](int n) {
      return basis->log_mixture(ordinary ? *nfold_rows_.get(n + 1) : *f0_rows_.get(n));
    };
  }

  LogSequence conv_f1(double t) const override {
    auto basis = std::make_shared<ErlangBasis>(f_.beta, t);
    return [this, basis](int n) { return basis->log_mixture(*f1_rows_.get(n)); };
  }

  LogSequence nfold(double y) const override {
    auto basis = std::make_shared<ErlangBasis>(f_.beta, y);
    return [this, basis](int n) { return basis->log_mixture(*nfold_rows_.get(n)); };
  }

  double log_nfold_bound() const override { return std::log(f_.p * f_.alpha + f_.q() * f_.beta); }
  int bound_from() const override { return 1; }
  std::string_view name() const override { return to_string(SourceKind::MixedExpErlangMixture); }

 private:
  static MixtureRows make_f0(const Model& model, double coeff_tol) {
    const auto f = std::get<MixedExponential>(model.family);
    const double mean = moments(model.family).mean;
    // equilibrium density = (p/(alpha mu)) Exp(alpha) + (q/(beta mu)) Exp(beta)
    const std::vector<GammaPairTerm> kernel{{f.p / (f.alpha * mean), 1, 0}, {f.q() / (f.beta * mean), 0, 1}};
    return MixtureRows([f, kernel, coeff_tol](int n) { return mixedexp_conv_mixture(f, n, kernel, coeff_tol); });
  }

  static MixtureRows make_f1(const Model& model, double coeff_tol) {
    const auto f = std::get<MixedExponential>(model.family);
    if (std::holds_alternative<OrdinaryDelay>(model.delay))
      return MixtureRows([f, coeff_tol](int n) { return mixedexp_eta_coeffs(f, n, coeff_tol); });
    const double mean = moments(model.family).mean;
    const std::vector<GammaPairTerm> kernel{{f.p / (f.alpha * f.alpha * mean), 2, 0},
                                            {f.q() / (f.beta * f.beta * mean), 0, 2}};
    return MixtureRows([f, kernel, coeff_tol](int n) { return mixedexp_conv_mixture(f, n, kernel, coeff_tol); });
  }

  MixedExponential f_;
  InterClaimFamily family_;
  DelaySpec delay_;
  MixtureRows nfold_rows_;
  MixtureRows f0_rows_;
  MixtureRows f1_rows_;
};

class MixedExpKummerSource final : public ConvolutionSource {
 public:
  explicit MixedExpKummerSource(const Model& model)
      : f_(std::get<MixedExponential>(model.family)),
        family_(model.family),
        delay_(model.delay),
        ordinary_(std::holds_alternative<OrdinaryDelay>(model.delay)) {
    const double mean = moments(model.family).mean;
    f0_kernel_ = {{f_.p / (f_.alpha * mean), 1, 0}, {f_.q() / (f_.beta * mean), 0, 1}};
    f1_kernel_ = {{f_.p / (f_.alpha * f_.alpha * mean), 2, 0}, {f_.q() / (f_.beta * f_.beta * mean), 0, 2}};
  }

  double log_f0(double t) const override { return log_or_neg_inf(delay_density(family_, delay_, t)); }

  LogSequence conv_f0(double t) const override {
    return [this, t](int n) {
      if (ordinary_) return log_mixedexp_conv_kummer(f_, n + 1, std::span(&unit_, 1), t, kSeriesTol);
      return log_mixedexp_conv_kummer(f_, n, f0_kernel_, t, kSeriesTol);
    };
  }

  LogSequence conv_f1(double t) const override {
    return [this, t](int n) {
      if (ordinary_) return log_or_neg_inf(mixedexp_conv_f1_kummer(f_, n, t, kSeriesTol));
      return log_mixedexp_conv_kummer(f_, n, f1_kernel_, t, kSeriesTol);
    };
  }

  LogSequence nfold(double y) const override {
    return [this, y](int n) { return log_mixedexp_conv_kummer(f_, n, std::span(&unit_, 1), y, kSeriesTol); };
  }

  double log_nfold_bound() const override { return std::log(f_.p * f_.alpha + f_.q() * f_.beta); }
  int bound_from() const override { return 1; }
  std::string_view name() const override { return to_string(SourceKind::MixedExpKummer); }

 private:
  MixedExponential f_;
  InterClaimFamily family_;
  DelaySpec delay_;
  bool ordinary_;
  GammaPairTerm unit_{1.0, 0, 0};
  std::vector<GammaPairTerm> f0_kernel_;
  std::vector<GammaPairTerm> f1_kernel_;
};

// One row f^{*n} on the grid. Trapezoid rows hold node values only; exact
// gamma rows also hold product-integration weights, so that
//   (f^{*n} * g)(k h) = sum_i g[k-i] a[i] + g[k-i-1] b[i]
// for g linear between nodes, which stays accurate when f^{*n} is singular at 0.
struct GridRow {
  std::vector<double> node;
  std::vector<double> a;
  std::vector<double> b;
};

constexpr std::size_t kExactPanels = 64;

// Gauss-Legendre 3-point rule on [0, 1]
constexpr double kGaussX[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr double kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Node values of f, f0, f1 on [0, horizon] and the rows f^{*n}, each extended
// only as far as a query needs. Row storage is reserved up front, so a prefix
// handed out under the lock is never moved by later growth.
struct GridState {
  double h = 0.0;
  std::size_t length = 0;
  std::vector<double> f;
  std::vector<double> f0;
  std::vector<double> f1;
  std::optional<GammaFamily> gamma;
  std::vector<double> gauss_log_s;  // log of the quadrature nodes, 3 per panel

  mutable std::mutex mu;
  mutable std::vector<std::unique_ptr<GridRow>> rows;

  // Row n with at least `need` entries (clamped to the grid length).
  const GridRow& row(int n, std::size_t need) const {
    need = std::min(need, length);
    std::lock_guard lock(mu);
    while (rows.size() < static_cast<std::size_t>(n)) {
      auto r = std::make_unique<GridRow>();
      (gamma ? r->a : r->node).reserve(length);
      if (gamma) r->b.reserve(length);
      rows.push_back(std::move(r));
    }
    extend(n, need);
    return *rows[static_cast<std::size_t>(n) - 1];
  }

 private:
  void extend(int n, std::size_t need) const {
    GridRow& r = *rows[static_cast<std::size_t>(n) - 1];
    if (gamma) {
      extend_gamma(n, r, need);
      return;
    }
    if (r.node.size() >= need) return;
    if (n == 1) {
      r.node.assign(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(need));
      return;
    }
    extend(n - 1, need);
    const std::vector<double>& prev = rows[static_cast<std::size_t>(n) - 2]->node;
    for (std::size_t k = r.node.size(); k < need; ++k) {
      if (k == 0) {
        r.node.push_back(0.0);
        continue;
      }
      double s = 0.0;
      for (std::size_t i = 0; i <= k; ++i) s += prev[k - i] * f[i];
      s -= 0.5 * (prev[k] * f[0] + prev[0] * f[k]);
      r.node.push_back(h * s);
    }
  }

  // Panel weights M1 = int g, M2 = int g (s - s_i)/h of g = Gamma(n a, beta)
  // over [s_i, s_i + h]: exact near the origin, Gauss-Legendre further out.
  void extend_gamma(int n, GridRow& r, std::size_t need) const {
    const double shape = gamma->shape * n;
    const double rate = gamma->rate;
    const double log_norm = shape * std::log(rate) - std::lgamma(shape);
    for (std::size_t i = r.a.size(); i < need; ++i) {
      const double s = static_cast<double>(i) * h;
      double m1 = 0.0;
      double m2 = 0.0;
      if (i < kExactPanels) {
        const double lo = rate * s;
        const double hi = rate * (s + h);
        m1 = gamma_p(shape, hi) - gamma_p(shape, lo);
        const double first = shape / rate * (gamma_p(shape + 1.0, hi) - gamma_p(shape + 1.0, lo));
        m2 = (first - s * m1) / h;
      } else {
        for (std::size_t j = 0; j < 3; ++j) {
          const double x = s + kGaussX[j] * h;
          const double g = std::exp(log_norm + (shape - 1.0) * gauss_log_s[3 * i + j] - rate * x);
          m1 += kGaussW[j] * g;
          m2 += kGaussW[j] * g * kGaussX[j];
        }
        m1 *= h;
        m2 *= h;
      }
      r.a.push_back(m1 - m2);
      r.b.push_back(m2);
    }
  }

  static double gamma_p(double a, double x) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(a, x); }
};

double interpolate(const std::vector<double>& v, double h, double t) {
  const double x = t / h;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= v.size()) return i < v.size() ? v[i] : 0.0;
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * v[i] + w * v[i + 1];
}

class GridSource final : public ConvolutionSource {
 public:
  GridSource(const Model& model, const SeriesConfig& cfg) : model_(model), h_(cfg.grid_dt) {
    if (const auto* tf = std::get_if<TabulatedFamily>(&model.family)) {
      family_grid_ = anchored_at_zero(tf->grid);
      h_ = family_grid_->dt;
    }
    if (const auto* g = std::get_if<GammaFamily>(&model.family)) gamma_ = *g;
    if (const auto* e = std::get_if<ExplicitDelay>(&model.delay)) {
      delay_grid_ = anchored_at_zero(e->grid);
      if (!family_grid_) h_ = delay_grid_->dt;
    } else if (family_grid_ && std::holds_alternative<StationaryDelay>(model.delay)) {
      delay_grid_ = equilibrium_grid(*family_grid_);
    }
    const auto mom = moments(model.family);
    double horizon = 10.0 * mom.mean;
    if (family_grid_) horizon = std::max(horizon, family_grid_->end());
    initial_horizon_ = horizon;
    if (gamma_) {
      // sup of Gamma(k, beta) over k >= 1 is beta
      log_bound_ = std::log(gamma_->rate);
      bound_from_ = static_cast<int>(std::ceil(1.0 / gamma_->shape - 1e-12));
    } else {
      double sup = 0.0;
      for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * h_;
        if (t > horizon) break;
        sup = std::max(sup, sample_f(t));
      }
      log_bound_ = std::log(1.01 * sup);
    }
  }

  double log_f0(double t) const override {
    if (delay_grid_) return log_or_neg_inf(delay_grid_->at(t));
    return log_or_neg_inf(delay_density(model_.family, model_.delay, t));
  }

  LogSequence conv_f0(double t) const override {
    auto st = state_for(t);
    return [st, t](int n) { return log_or_neg_inf(mixed_at(*st, n, st->f0, t)); };
  }

  LogSequence conv_f1(double t) const override {
    auto st = state_for(t);
    return [st, t](int n) { return log_or_neg_inf(mixed_at(*st, n, st->f1, t)); };
  }

  LogSequence nfold(double y) const override {
    if (gamma_) {
      const GammaFamily g = *gamma_;
      return [g, y](int n) { return log_gamma_density(g.shape * n, g.rate, y); };
    }
    auto st = state_for(y);
    return [st, y](int n) {
      const std::size_t need = static_cast<std::size_t>(y / st->h) + 2;
      return log_or_neg_inf(interpolate(st->row(n, need).node, st->h, y));
    };
  }

  double log_nfold_bound() const override { return log_bound_; }
  int bound_from() const override { return bound_from_; }
  std::string_view name() const override { return to_string(SourceKind::Grid); }

 private:
  double sample_f(double t) const {
    if (family_grid_) return family_grid_->at(t);
    double v = family_density(model_.family, t);
    if (!std::isfinite(v)) v = family_density(model_.family, 0.25 * h_);
    return v;
  }

  double sample_f0(double t) const {
    if (delay_grid_) return delay_grid_->at(t);
    double v = delay_density(model_.family, model_.delay, t);
    if (!std::isfinite(v)) v = delay_density(model_.family, model_.delay, 0.25 * h_);
    return v;
  }

  // (f^{*n} * g)(t) at the two neighbouring nodes, interpolated linearly
  static double mixed_at(const GridState& st, int n, const std::vector<double>& g, double t) {
    const double x = t / st.h;
    const auto k = static_cast<std::size_t>(x);
    const double w = x - static_cast<double>(k);
    const GridRow& row = st.row(n, k + 2);
    const auto node = [&](std::size_t m) {
      if (m == 0) return 0.0;
      double s = 0.0;
      if (st.gamma) {
        for (std::size_t i = 0; i < m; ++i) s += g[m - i] * row.a[i] + g[m - i - 1] * row.b[i];
        return s;
      }
      const auto& r = row.node;
      for (std::size_t i = 0; i <= m; ++i) s += r[m - i] * g[i];
      s -= 0.5 * (r[m] * g[0] + r[0] * g[m]);
      return st.h * s;
    };
    const double lo = node(k);
    return w == 0.0 ? lo : (1.0 - w) * lo + w * node(k + 1);
  }

  std::shared_ptr<const GridState> state_for(double t) const {
    std::lock_guard lock(mu_);
    if (!state_ || t + 2.0 * h_ > state_horizon_) {
      const double horizon = std::max({initial_horizon_, 2.0 * state_horizon_, 1.25 * t + 4.0 * h_});
      auto st = std::make_shared<GridState>();
      st->h = h_;
      st->gamma = gamma_;
      st->length = static_cast<std::size_t>(std::ceil(horizon / h_)) + 2;
      st->f.resize(st->length);
      st->f0.resize(st->length);
      st->f1.resize(st->length);
      for (std::size_t i = 0; i < st->length; ++i) {
        const double ti = static_cast<double>(i) * h_;
        st->f[i] = sample_f(ti);
        st->f0[i] = sample_f0(ti);
        st->f1[i] = ti * st->f0[i];
      }
      if (gamma_) {
        st->gauss_log_s.resize(3 * st->length);
        for (std::size_t i = 0; i < st->length; ++i)
          for (std::size_t j = 0; j < 3; ++j)
            st->gauss_log_s[3 * i + j] = std::log((static_cast<double>(i) + kGaussX[j]) * h_);
      }
      state_ = std::move(st);
      state_horizon_ = static_cast<double>(state_->length - 1) * h_;
    }
    return state_;
  }

  Model model_;
  double h_;
  std::optional<DensityGrid> family_grid_;
  std::optional<DensityGrid> delay_grid_;
  std::optional<GammaFamily> gamma_;
  double initial_horizon_ = 0.0;
  double log_bound_ = 0.0;
  int bound_from_ = 1;
  mutable std::mutex mu_;
  mutable std::shared_ptr<const GridState> state_;
  mutable double state_horizon_ = 0.0;
};

}  // namespace

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::GammaClosedForm: return "gamma-closed-form";
    case SourceKind::GammaStationaryErlang: return "gamma-stationary-erlang";
    case SourceKind::MixedExpErlangMixture: return "mixedexp-erlang-mixture";
    case SourceKind::MixedExpKummer: return "mixedexp-kummer";
    case SourceKind::GammaStationaryIncomplete: return "gamma-stationary-incomplete";
    case SourceKind::Grid: return "grid";
  }
  return "unknown";
}

std::shared_ptr<const ConvolutionSource> make_source(SourceKind kind, const Model& model, const SeriesConfig& cfg) {
  const auto* gamma = std::get_if<GammaFamily>(&model.family);
  const bool ordinary = std::holds_alternative<OrdinaryDelay>(model.delay);
  const bool stationary = std::holds_alternative<StationaryDelay>(model.delay);
  const bool mixed = std::holds_alternative<MixedExponential>(model.family);
  switch (kind) {
    case SourceKind::GammaClosedForm:
      if (gamma && ordinary) return std::make_shared<GammaClosedSource>(*gamma);
      break;
    case SourceKind::GammaStationaryErlang:
      if (gamma && stationary)
        if (auto k = integer_shape(gamma->shape)) return std::make_shared<GammaStationaryErlangSource>(*k, gamma->rate);
      break;
    case SourceKind::GammaStationaryIncomplete:
      if (gamma && stationary) return std::make_shared<GammaStationaryIncompleteSource>(*gamma);
      break;
    case SourceKind::MixedExpErlangMixture:
      if (mixed && (ordinary || stationary)) return std::make_shared<MixedExpMixtureSource>(model, cfg.coeff_tol);
      break;
    case SourceKind::MixedExpKummer:
      if (mixed && (ordinary || stationary)) return std::make_shared<MixedExpKummerSource>(model);
      break;
    case SourceKind::Grid:
      return std::make_shared<GridSource>(model, cfg);
  }
  throw UnsupportedError(std::string("convolution source '") + std::string(to_string(kind)) +
                         "' does not support family " + family_name(model.family) + " with delay " +
                         delay_name(model.delay));
}

}  // namespace ruin
