// sparre: ruin-time densities, finite-time ruin probabilities and Monte Carlo
// runs for the Sparre Andersen model with exponential claims.
//
// Exit codes: 0 success, 1 check failure, 2 usage error, 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ruin/checks.hpp"
#include "ruin/density.hpp"
#include "ruin/errors.hpp"
#include "ruin/io.hpp"
#include "ruin/model.hpp"
#include "ruin/montecarlo.hpp"
#include "ruin/quadrature.hpp"

namespace {

using nlohmann::ordered_json;
using ruin::format_double;

constexpr const char* kSchemaVersion = "1";
constexpr double kMaxGridPoints = 1e7;

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumeric = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelOptions {
  double u = 0.0;
  double c = 1.1;
  double lambda = 1.0;
  std::string family = "gamma";
  double shape = 2.0;
  double rate = 2.0;
  std::optional<double> p;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string density_file;
  std::string delay = "ordinary";
  std::string delay_file;
  std::string path = "auto";
  double tol = 1e-12;
  int max_terms = 10'000;
  double coeff_tol = 1e-14;
  double grid_dt = 1e-3;
};

struct OutputOptions {
  double quad_tol = ruin::kDefaultQuadTol;
  std::string out = "csv";
  std::string output;
  int threads = 1;
};

struct Options {
  ModelOptions model;
  OutputOptions io;
  double t = 20.0;
  double t_max = 100.0;
  double dt = 0.1;
  std::uint64_t seed = 42;
  std::uint64_t paths = 100'000;
  double horizon = 20.0;
  double bin_width = 0.5;
  bool check = false;
  bool list = false;
  std::string inject;
  std::vector<std::string> only;
};

void add_model_options(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--u", m.u, "initial surplus (>= 0)")->capture_default_str();
  cmd->add_option("--c", m.c, "premium rate (> 0)")->capture_default_str();
  cmd->add_option("--lambda", m.lambda, "rate of the exponential claim sizes")->capture_default_str();
  cmd->add_option("--family", m.family, "inter-claim law")
      ->check(CLI::IsMember({"gamma", "mixedexp", "tabulated"}))
      ->capture_default_str();
  cmd->add_option("--shape", m.shape, "gamma shape n")->capture_default_str();
  cmd->add_option("--rate", m.rate, "gamma rate beta")->capture_default_str();
  cmd->add_option("--p", m.p, "mixed exponential weight of the alpha component");
  cmd->add_option("--alpha", m.alpha, "mixed exponential slow rate");
  cmd->add_option("--beta", m.beta, "mixed exponential fast rate (> alpha)");
  cmd->add_option("--density-file", m.density_file, "CSV t,value of the tabulated inter-claim density");
  cmd->add_option("--delay", m.delay, "law of the first inter-claim time")
      ->check(CLI::IsMember({"ordinary", "stationary", "file"}))
      ->capture_default_str();
  cmd->add_option("--delay-file", m.delay_file, "CSV t,value of the first inter-claim density (--delay file)");
  cmd->add_option("--path", m.path, "evaluation route")
      ->check(CLI::IsMember({"auto", "generic", "closed"}))
      ->capture_default_str();
  cmd->add_option("--tol", m.tol, "series truncation tolerance")->capture_default_str();
  cmd->add_option("--max-terms", m.max_terms, "cap on the series index")->capture_default_str();
  cmd->add_option("--coeff-tol", m.coeff_tol, "tolerance of inner coefficient sums")->capture_default_str();
  cmd->add_option("--grid-dt", m.grid_dt, "step of numeric convolutions")->capture_default_str();
}

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--quad-tol", o.quad_tol, "absolute quadrature tolerance")->capture_default_str();
  cmd->add_option("--out", o.out, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--output", o.output, "output file (default standard output)");
  cmd->add_option("--threads", o.threads, "worker threads")->capture_default_str();
}

ruin::InterClaimFamily build_family(const ModelOptions& m) {
  if (m.family == "gamma") return ruin::GammaFamily{m.shape, m.rate};
  if (m.family == "mixedexp") {
    if (!m.p || !m.alpha || !m.beta) throw UsageError("--family mixedexp requires --p, --alpha and --beta");
    return ruin::MixedExponential{*m.p, *m.alpha, *m.beta};
  }
  if (m.density_file.empty()) throw UsageError("--family tabulated requires --density-file");
  return ruin::TabulatedFamily{ruin::read_grid_csv_file(m.density_file)};
}

ruin::DelaySpec build_delay(const ModelOptions& m) {
  if (m.delay == "ordinary") return ruin::OrdinaryDelay{};
  if (m.delay == "stationary") return ruin::StationaryDelay{};
  if (m.delay_file.empty()) throw UsageError("--delay file requires --delay-file");
  return ruin::ExplicitDelay{ruin::read_grid_csv_file(m.delay_file)};
}

ruin::DensityPath build_path(const std::string& s) {
  if (s == "generic") return ruin::DensityPath::GenericSeries;
  if (s == "closed") return ruin::DensityPath::ClosedForm;
  return ruin::DensityPath::Auto;
}

ruin::DensityQuery build_query(const ModelOptions& m) {
  ruin::SeriesConfig cfg{m.tol, m.max_terms, m.coeff_tol, m.grid_dt};
  return {{m.u, m.c, m.lambda}, build_family(m), build_delay(m), cfg, build_path(m.path)};
}

ordered_json model_parameters(const ModelOptions& m) {
  ordered_json j;
  j["u"] = m.u;
  j["c"] = m.c;
  j["lambda"] = m.lambda;
  j["family"] = m.family;
  if (m.family == "gamma") {
    j["shape"] = m.shape;
    j["rate"] = m.rate;
  } else if (m.family == "mixedexp") {
    j["p"] = m.p ? ordered_json(*m.p) : ordered_json();
    j["alpha"] = m.alpha ? ordered_json(*m.alpha) : ordered_json();
    j["beta"] = m.beta ? ordered_json(*m.beta) : ordered_json();
  } else {
    j["density_file"] = m.density_file;
  }
  j["delay"] = m.delay;
  if (m.delay == "file") j["delay_file"] = m.delay_file;
  j["path"] = m.path;
  j["tol"] = m.tol;
  j["max_terms"] = m.max_terms;
  j["coeff_tol"] = m.coeff_tol;
  j["grid_dt"] = m.grid_dt;
  return j;
}

// Holds the destination stream and renders the record in the chosen format.
class Emitter {
 public:
  Emitter(std::string command, const OutputOptions& io) : command_(std::move(command)), io_(io) {
    record_["schema_version"] = kSchemaVersion;
    record_["command"] = command_;
    record_["parameters"] = ordered_json::object();
    record_["results"] = ordered_json::object();
    record_["warnings"] = ordered_json::array();
  }

  ordered_json& parameters() { return record_["parameters"]; }
  ordered_json& results() { return record_["results"]; }
  void warn(const std::string& w) { record_["warnings"].push_back(w); }

  bool csv() const { return io_.out == "csv"; }

  /// CSV: `#` lines echoing parameters and warnings, then the header row and `rows`.
  void write(const std::string& csv_body) {
    std::ofstream file;
    if (!io_.output.empty()) {
      file.open(io_.output);
      if (!file) throw UsageError("cannot open output file " + io_.output);
    }
    std::ostream& out = io_.output.empty() ? std::cout : file;
    if (csv()) {
      out << "# schema_version=" << kSchemaVersion << " command=" << command_ << '\n';
      for (const auto& [key, value] : record_["parameters"].items()) out << "# " << key << '=' << scalar(value) << '\n';
      for (const auto& w : record_["warnings"]) out << "# warning: " << w.get<std::string>() << '\n';
      out << csv_body;
    } else {
      out << record_.dump(2) << '\n';
    }
    out.flush();
  }

 private:
  static std::string scalar(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
  }

  std::string command_;
  const OutputOptions& io_;
  ordered_json record_;
};

void echo_common(Emitter& e, const Options& o) {
  e.parameters() = model_parameters(o.model);
  e.parameters()["quad_tol"] = o.io.quad_tol;
  e.parameters()["threads"] = o.io.threads;
}

void attach_warnings(Emitter& e, const ruin::Model& model) {
  for (const auto& w : model.warnings) e.warn(w);
}

int cmd_density(const Options& o) {
  if (!(o.t_max > 0.0)) throw UsageError("t-max must be positive");
  if (!(o.dt > 0.0)) throw UsageError("dt must be positive");
  if (o.t_max / o.dt > kMaxGridPoints) throw UsageError("grid would exceed 1e7 points");
  if (o.io.threads < 1) throw UsageError("threads must be at least 1");
  const ruin::RuinDensity density(build_query(o.model));
  const ruin::DensityGrid grid = ruin::tabulate_density(density, o.t_max, o.dt, o.io.threads);

  Emitter e("density", o.io);
  echo_common(e, o);
  e.parameters()["t_max"] = o.t_max;
  e.parameters()["dt"] = o.dt;
  attach_warnings(e, density.model());
  std::ostringstream body;
  if (e.csv()) {
    ruin::write_grid_csv(body, grid, "t", "density");
  } else {
    e.results()["method"] = std::string(density.method());
    e.results()["t0"] = grid.t0;
    e.results()["dt"] = grid.dt;
    e.results()["t"] = ordered_json::array();
    e.results()["density"] = grid.values;
    for (std::size_t i = 0; i < grid.size(); ++i) e.results()["t"].push_back(grid.time(i));
  }
  e.write(body.str());
  return kOk;
}

int cmd_prob(const Options& o) {
  if (!(o.t >= 0.0)) throw UsageError("t must be >= 0");
  const ruin::RuinDensity density(build_query(o.model));
  const ruin::RuinProbResult r = ruin::ruin_prob(density, o.t, o.io.quad_tol);

  Emitter e("prob", o.io);
  echo_common(e, o);
  e.parameters()["t"] = o.t;
  attach_warnings(e, density.model());
  std::ostringstream body;
  if (e.csv()) {
    body << "u,t,psi,abs_error_estimate,evaluations\n"
         << format_double(o.model.u) << ',' << format_double(o.t) << ',' << format_double(r.value) << ','
         << format_double(r.abs_error_estimate) << ',' << r.evaluations << '\n';
  } else {
    e.results()["method"] = std::string(density.method());
    e.results()["psi"] = r.value;
    e.results()["abs_error_estimate"] = r.abs_error_estimate;
    e.results()["evaluations"] = r.evaluations;
  }
  e.write(body.str());
  return kOk;
}

// The table as printed, rows t = 20..100, columns psi/psi_e at u = 0, 10, 20.
constexpr std::array<double, 5> kTableTimes = {20, 40, 60, 80, 100};
constexpr std::array<double, 3> kTableSurplus = {0, 10, 20};
constexpr double kPrinted[5][6] = {
    {0.7973, 0.8463, 0.0457, 0.0509, 0.0009, 0.0010}, {0.8332, 0.8735, 0.1008, 0.1082, 0.0060, 0.0066},
    {0.8481, 0.8848, 0.1387, 0.1469, 0.0138, 0.0148}, {0.8564, 0.8912, 0.1651, 0.1737, 0.0218, 0.0232},
    {0.8618, 0.8952, 0.1842, 0.1930, 0.0292, 0.0309}};
constexpr double kTableBand = 5e-5;

int cmd_table1(const Options& o) {
  double values[5][6];
  std::vector<std::string> warnings;
  for (std::size_t col = 0; col < 6; ++col) {
    ModelOptions m = o.model;
    m.family = "gamma";
    m.u = kTableSurplus[col / 2];
    m.delay = col % 2 == 0 ? "ordinary" : "stationary";
    const ruin::RuinDensity density(build_query(m));
    if (col == 0) warnings = density.model().warnings;
    for (std::size_t row = 0; row < 5; ++row)
      values[row][col] = ruin::ruin_prob(density, kTableTimes[row], o.io.quad_tol).value;
  }

  // A cell matches only if the deviation plus the requested quadrature
  // tolerance fits in the printed rounding band.
  int mismatches = 0;
  double worst = 0.0;
  for (std::size_t row = 0; row < 5; ++row)
    for (std::size_t col = 0; col < 6; ++col) {
      const double dev = std::abs(values[row][col] - kPrinted[row][col]) + o.io.quad_tol;
      worst = std::max(worst, dev);
      if (!(dev <= kTableBand)) ++mismatches;
    }

  Emitter e("table1", o.io);
  ordered_json params;
  params["c"] = o.model.c;
  params["lambda"] = o.model.lambda;
  params["shape"] = o.model.shape;
  params["rate"] = o.model.rate;
  params["tol"] = o.model.tol;
  params["quad_tol"] = o.io.quad_tol;
  params["check"] = o.check;
  e.parameters() = params;
  for (const auto& w : warnings) e.warn(w);
  static const char* kColumns[6] = {"psi_0", "psi_e_0", "psi_10", "psi_e_10", "psi_20", "psi_e_20"};
  std::ostringstream body;
  if (e.csv()) {
    body << "t";
    for (const char* name : kColumns) body << ',' << name;
    body << '\n';
    for (std::size_t row = 0; row < 5; ++row) {
      body << format_double(kTableTimes[row]);
      for (std::size_t col = 0; col < 6; ++col) body << ',' << format_double(values[row][col]);
      body << '\n';
    }
  } else {
    ordered_json rows = ordered_json::array();
    for (std::size_t row = 0; row < 5; ++row) {
      ordered_json r;
      r["t"] = kTableTimes[row];
      for (std::size_t col = 0; col < 6; ++col) r[kColumns[col]] = values[row][col];
      rows.push_back(r);
    }
    e.results()["rows"] = rows;
    if (o.check) {
      e.results()["check"] = {{"band", kTableBand}, {"worst_deviation_plus_tol", worst}, {"mismatches", mismatches}};
    }
  }
  e.write(body.str());
  if (o.check) {
    std::cerr << "table1 check: " << (mismatches == 0 ? "pass" : "FAIL") << " (" << mismatches
              << " cells outside band; worst |psi - printed| + quad_tol = " << format_double(worst) << ")\n";
    return mismatches == 0 ? kOk : kCheckFailed;
  }
  return kOk;
}

int cmd_simulate(const Options& o) {
  ruin::SimConfig sim;
  sim.n_paths = o.paths;
  sim.horizon = o.horizon;
  sim.seed = o.seed;
  sim.bin_width = o.bin_width;
  sim.threads = o.io.threads;
  if (o.horizon / o.bin_width > kMaxGridPoints) throw UsageError("histogram would exceed 1e7 bins");
  sim.validate();
  const ruin::DensityQuery q = build_query(o.model);
  const ruin::Model model = ruin::validate(q.params, q.family, q.delay);
  const ruin::SimResult r = ruin::simulate(q.params, q.family, q.delay, sim);
  const std::vector<double> se = r.bin_standard_errors();

  Emitter e("simulate", o.io);
  echo_common(e, o);
  e.parameters()["seed"] = o.seed;
  e.parameters()["paths"] = o.paths;
  e.parameters()["horizon"] = o.horizon;
  e.parameters()["bin_width"] = o.bin_width;
  e.parameters()["rng"] = std::string(ruin::kRngAlgorithm);
  attach_warnings(e, model);
  std::ostringstream body;
  const double n = static_cast<double>(r.n_paths);
  if (e.csv()) {
    body << "# ruined=" << r.ruined << " survived=" << r.survived << " ruin_fraction=" << format_double(r.ruin_fraction())
         << " ruin_fraction_se=" << format_double(r.ruin_fraction_se()) << '\n';
    body << "bin_start,bin_end,count,fraction,std_error\n";
    for (std::size_t k = 0; k < r.bins.size(); ++k) {
      body << format_double(r.bin_start(k)) << ',' << format_double(r.bin_end(k)) << ',' << r.bins[k] << ','
           << format_double(static_cast<double>(r.bins[k]) / n) << ',' << format_double(se[k]) << '\n';
    }
  } else {
    e.results()["n_paths"] = r.n_paths;
    e.results()["ruined"] = r.ruined;
    e.results()["survived"] = r.survived;
    e.results()["ruin_fraction"] = r.ruin_fraction();
    e.results()["ruin_fraction_se"] = r.ruin_fraction_se();
    ordered_json bins = ordered_json::array();
    for (std::size_t k = 0; k < r.bins.size(); ++k) {
      bins.push_back({{"start", r.bin_start(k)}, {"end", r.bin_end(k)}, {"count", r.bins[k]}, {"std_error", se[k]}});
    }
    e.results()["histogram"] = bins;
  }
  e.write(body.str());
  return kOk;
}

int cmd_verify(const Options& o) {
  Emitter e("verify", o.io);
  e.parameters()["inject_error"] = o.inject;
  e.parameters()["checks"] = o.only;
  if (o.list) {
    std::ostringstream body;
    body << "check\n";
    ordered_json names = ordered_json::array();
    for (auto name : ruin::list_checks()) {
      body << name << '\n';
      names.push_back(std::string(name));
    }
    e.results()["checks"] = names;
    e.write(body.str());
    return kOk;
  }
  if (!o.inject.empty() && o.inject != "eta") throw UsageError("--inject-error supports only: eta");
  ruin::CheckOptions options;
  options.inject_eta_error = o.inject == "eta";
  const auto results = ruin::run_checks(options, o.only);
  bool all = true;
  std::ostringstream body;
  body << "check,passed,measured,tolerance,detail\n";
  ordered_json list = ordered_json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    std::string detail = r.detail;
    for (char& ch : detail)
      if (ch == ',') ch = ';';
    body << r.name << ',' << (r.passed ? "true" : "false") << ',' << format_double(r.measured) << ','
         << format_double(r.tolerance) << ',' << detail << '\n';
    list.push_back({{"name", r.name},
                    {"passed", r.passed},
                    {"measured", std::isfinite(r.measured) ? ordered_json(r.measured) : ordered_json()},
                    {"tolerance", r.tolerance},
                    {"detail", r.detail}});
    std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << '\n';
  }
  e.results()["checks"] = list;
  e.results()["all_passed"] = all;
  e.write(body.str());
  return all ? kOk : kCheckFailed;
}

int cmd_moments(const Options& o) {
  const ruin::InterClaimFamily family = build_family(o.model);
  ruin::validate_family(family);
  const ruin::Moments mo = ruin::moments(family);
  Emitter e("moments", o.io);
  e.parameters() = model_parameters(o.model);
  std::ostringstream body;
  if (e.csv()) {
    body << "mean,variance\n" << format_double(mo.mean) << ',' << format_double(mo.variance) << '\n';
  } else {
    e.results()["mean"] = mo.mean;
    e.results()["variance"] = mo.variance;
  }
  e.write(body.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ruin-time densities and finite-time ruin probabilities for the Sparre Andersen model"};
  app.require_subcommand(1);
  Options o;

  auto* density = app.add_subcommand("density", "tabulate the ruin-time density");
  add_model_options(density, o.model);
  add_output_options(density, o.io);
  density->add_option("--t-max", o.t_max, "last grid time")->capture_default_str();
  density->add_option("--dt", o.dt, "grid step")->capture_default_str();

  auto* prob = app.add_subcommand("prob", "finite-time ruin probability psi(u, t)");
  add_model_options(prob, o.model);
  add_output_options(prob, o.io);
  prob->add_option("--t", o.t, "time horizon")->capture_default_str();

  auto* table1 = app.add_subcommand("table1", "gamma(2) table of psi and psi_e for u = 0, 10, 20");
  add_model_options(table1, o.model);
  add_output_options(table1, o.io);
  table1->add_flag("--check", o.check, "compare with the published 4-decimal values");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo ruin-time histogram");
  add_model_options(simulate, o.model);
  add_output_options(simulate, o.io);
  simulate->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--paths", o.paths, "number of simulated paths")->capture_default_str();
  simulate->add_option("--horizon", o.horizon, "simulation horizon")->capture_default_str();
  simulate->add_option("--bin-width", o.bin_width, "histogram bin width")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run the identity and cross-path checks");
  add_output_options(verify, o.io);
  verify->add_flag("--list", o.list, "list check names without running them");
  verify->add_option("--inject-error", o.inject, "perturb a component to exercise the checks (eta)");
  verify->add_option("--check", o.only, "run only the named checks");

  auto* moments = app.add_subcommand("moments", "mean and variance of the inter-claim law");
  add_model_options(moments, o.model);
  add_output_options(moments, o.io);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*density) return cmd_density(o);
    if (*prob) return cmd_prob(o);
    if (*table1) return cmd_table1(o);
    if (*simulate) return cmd_simulate(o);
    if (*verify) return cmd_verify(o);
    if (*moments) return cmd_moments(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ruin::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ruin::QuadratureError& e) {
    std::cerr << "numeric failure: " << e.what() << " (best value " << format_double(e.best_value())
              << ", error estimate " << format_double(e.error_estimate()) << ")\n";
    return kNumeric;
  } catch (const ruin::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
