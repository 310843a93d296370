// Command-line front end. Every subcommand writes its artifact atomically to
// --out (stdout when omitted). Exit codes: 0 success, 1 usage or input error,
// 2 numerical failure.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flqr/error.hpp"
#include "flqr/estimator.hpp"
#include "flqr/inference.hpp"
#include "flqr/io.hpp"
#include "flqr/monotonize.hpp"
#include "flqr/parallel.hpp"
#include "flqr/serialize.hpp"
#include "flqr/simharness.hpp"
#include "flqr/spectrum.hpp"

namespace {

using namespace flqr;
using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_file_atomic(path, text);
  }
}

// CSV table to a JSON array of records; numeric cells become numbers.
std::string csv_to_json(const std::string& csv) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < csv.size()) {
    const auto end = csv.find('\n', start);
    lines.push_back(csv.substr(start, end - start));
    start = end == std::string::npos ? csv.size() : end + 1;
  }
  auto out = json::array();
  if (lines.empty()) return out.dump(2) + '\n';
  const auto header = io::split_csv(lines[0]);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto cells = io::split_csv(lines[r]);
    json row = json::object();
    for (std::size_t c = 0; c < header.size() && c < cells.size(); ++c) {
      double v;
      if (io::parse_double(cells[c], v)) {
        row[std::string(header[c])] = v;
      } else {
        row[std::string(header[c])] = std::string(cells[c]);
      }
    }
    out.push_back(row);
  }
  return out.dump(2) + '\n';
}

std::string formatted(const std::string& csv, const std::string& format) {
  return format == "json" ? csv_to_json(csv) : csv;
}

// Fills options of `sub` that were not given on the command line from a JSON
// object whose keys are the long flag names (dashes or underscores).
void apply_config(CLI::App* sub, const std::string& path) {
  json cfg;
  try {
    cfg = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, "config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) fail(ErrorKind::ParseError, "config " + path + ": expected a JSON object");
  for (CLI::Option* opt : sub->get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string alt = name;
    std::replace(alt.begin(), alt.end(), '-', '_');
    const json* value = cfg.contains(name) ? &cfg[name] : (cfg.contains(alt) ? &cfg[alt] : nullptr);
    if (!value) continue;
    auto add = [&](const json& v) {
      if (v.is_string()) {
        opt->add_result(v.get<std::string>());
      } else if (v.is_number_float()) {
        opt->add_result(io::format_double(v.get<double>()));
      } else {
        opt->add_result(v.dump());
      }
    };
    if (value->is_array()) {
      for (const auto& v : *value) add(v);
    } else {
      add(*value);
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config key '" + name + "': " + e.what());
    }
  }
}

void require(CLI::App* sub, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (sub->get_option(n)->count() == 0) {
      throw UsageError(std::string(sub->get_name()) + ": " + n + " is required");
    }
  }
}

int resolve_threads(int threads) { return threads > 0 ? threads : default_threads(); }

FitBundle read_fit(const std::string& path) { return fit_from_json(io::read_file(path)); }

const EigenSystem& need_eigensystem(const FitBundle& b) {
  if (!b.eigensystem) fail(ErrorKind::ConfigMismatch, "fit file has no eigensystem block; refit with `fit`");
  return *b.eigensystem;
}

struct Args {
  std::string config;
  int threads = 0;
  std::string out;
  std::string format = "csv";

  // Data and model.
  std::string curves, y, fit_path, x0_path, path_csv;
  double tau = 0.5;
  double h = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int folds = 5;
  std::vector<double> lambda_grid = TuningConfig::default_lambda_grid();
  std::string cv_rule = "one-se";
  double tol = 1e-6;
  int max_iter = 10000;
  int n_eig = 30;
  int basis_dim = 50;
  std::string beta_out, cv_out, eig_out;

  // Inference.
  double level = 0.95;
  std::vector<double> t_points;
  long paths = 10000;

  // Monotonization.
  std::vector<double> taus;
  double weight = 0.5;
  bool shared_lambda = false;

  // Simulation.
  std::string experiment = "mise";
  std::string design = "normal";
  double snr = 10.0;
  int n = 200;
  int reps = 50;
  std::vector<std::string> methods{"rkhs", "fpca"};
  bool with_x0 = false;
  int scb_paths = 0;
  std::string summary_out;
  std::string curves_out, y_out;
};

void add_fit_flags(CLI::App* s, Args& a) {
  s->add_option("--h", a.h, "Smoothing bandwidth (rule of thumb when omitted)");
  s->add_option("--lambda", a.lambda, "Penalty (cross-validated when omitted)");
  s->add_option("--seed", a.seed, "Seed for the cross-validation folds (required)");
  s->add_option("--folds", a.folds, "Cross-validation folds")->capture_default_str();
  s->add_option("--lambda-grid", a.lambda_grid, "Candidate penalties")->delimiter(',')->capture_default_str();
  s->add_option("--cv-rule", a.cv_rule, "Penalty selection rule")
      ->check(CLI::IsMember({"one-se", "min"}))
      ->capture_default_str();
  s->add_option("--tol", a.tol, "Gradient-norm tolerance")->capture_default_str();
  s->add_option("--max-iter", a.max_iter, "Iteration cap")->capture_default_str();
}

FitOptions fit_options(CLI::App* s, const Args& a) {
  FitOptions o;
  if (s->get_option("--h")->count()) o.h = a.h;
  if (s->get_option("--lambda")->count()) o.lambda = a.lambda;
  o.tuning.lambda_grid = a.lambda_grid;
  o.tuning.folds = a.folds;
  o.tuning.seed = a.seed;
  o.tuning.rule = cv_rule_from_string(a.cv_rule);
  o.tuning.threads = resolve_threads(a.threads);
  o.gd.tol = a.tol;
  o.gd.max_iter = a.max_iter;
  return o;
}

std::vector<double> parse_taus(const std::vector<double>& taus) {
  if (taus.empty()) {
    const Vector g = default_monotone_grid();
    return {g.data(), g.data() + g.size()};
  }
  return taus;
}

void run_fit(CLI::App* s, Args& a) {
  require(s, {"--curves", "--y", "--tau", "--seed"});
  if (a.n_eig < 1 || a.n_eig > a.basis_dim) throw UsageError("fit: --n-eig must lie in [1, basis-dim]");
  const FunctionalSample sample = load_sample(a.curves, a.y);
  const FitResult f = fit(sample, a.tau, fit_options(s, a));
  const Index basis = std::min<Index>(a.basis_dim, sample.size());
  EigenSystem es = solve_eigensystem(sample, f.b_hat, std::min<Index>(a.n_eig, basis), basis);
  const InferenceDiagnostics d = inference_diagnostics(f, es, sample);
  if (d.truncation_flag) {
    std::cerr << "warning: upper half of the eigen-terms carries " << d.truncation_share
              << " of the variance sum; consider a larger --n-eig\n";
  }
  if (f.trace.status != FitStatus::Converged) std::cerr << "warning: optimizer reached --max-iter\n";
  if (!a.beta_out.empty()) io::write_file_atomic(a.beta_out, beta_csv(f));
  if (!a.cv_out.empty() && !f.cv_table.empty()) io::write_file_atomic(a.cv_out, cv_table_csv({f.lambda, f.cv_table}));
  if (!a.eig_out.empty()) io::write_file_atomic(a.eig_out, eigensystem_csv(es));
  emit(a.out, fit_to_json({f, std::move(es), d}));
}

void run_predict(CLI::App* s, Args& a) {
  require(s, {"--fit", "--curves"});
  const FitBundle b = read_fit(a.fit_path);
  std::string csv = "index,prediction\n";
  const auto curves = load_curves(a.curves);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    csv += std::to_string(i) + ',' + io::format_double(predict(b.fit, curves[i])) + '\n';
  }
  emit(a.out, formatted(csv, a.format));
}

void run_ci(CLI::App* s, Args& a) {
  require(s, {"--fit"});
  const FitBundle b = read_fit(a.fit_path);
  const EigenSystem& es = need_eigensystem(b);
  std::vector<PointwiseCi> cis;
  if (a.t_points.empty()) {
    cis = pointwise_band(b.fit, es, a.level);
  } else {
    for (double t : a.t_points) cis.push_back(pointwise_ci(b.fit, es, t, a.level));
  }
  emit(a.out, formatted(ci_csv(cis), a.format));
}

void run_scb(CLI::App* s, Args& a) {
  require(s, {"--fit", "--seed"});
  const FitBundle b = read_fit(a.fit_path);
  const Scb band = scb(b.fit, need_eigensystem(b), a.level, a.paths, a.seed, resolve_threads(a.threads));
  std::cerr << "q_alpha = " << io::format_double(band.q_alpha) << '\n';
  emit(a.out, formatted(scb_csv(band), a.format));
}

void run_quantile_ci(CLI::App* s, Args& a) {
  require(s, {"--fit", "--x0"});
  const FitBundle b = read_fit(a.fit_path);
  emit(a.out, quantile_ci_json(quantile_ci(b.fit, need_eigensystem(b), load_curve(a.x0_path), a.level)));
}

QuantilePath read_path_csv(const std::string& file) {
  const std::string text = io::read_file(file);
  std::vector<double> taus, values;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    const std::string line = text.substr(start, end - start);
    start = end == std::string::npos ? text.size() : end + 1;
    ++line_no;
    if (line.empty() || line_no == 1) continue;  // header
    const auto cells = io::split_csv(line);
    double t, v;
    if (cells.size() < 2 || !io::parse_double(cells[0], t) || !io::parse_double(cells[1], v)) {
      fail(ErrorKind::ParseError, file + ": line " + std::to_string(line_no) + ": expected tau,value");
    }
    taus.push_back(t);
    values.push_back(v);
  }
  QuantilePath p{Eigen::Map<const Vector>(taus.data(), static_cast<Index>(taus.size())),
                 Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()))};
  p.validate();
  return p;
}

void run_monotonize(CLI::App* s, Args& a) {
  QuantilePath path;
  if (s->get_option("--path")->count()) {
    path = read_path_csv(a.path_csv);
  } else {
    require(s, {"--curves", "--y", "--x0", "--seed"});
    const FunctionalSample sample = load_sample(a.curves, a.y);
    FamilyOptions fo;
    fo.fit = fit_options(s, a);
    fo.fit.tuning.threads = 1;
    fo.shared_lambda = a.shared_lambda;
    fo.threads = resolve_threads(a.threads);
    const QuantileCurveFamily family = fit_family(sample, parse_taus(a.taus), fo);
    for (const auto& f : family.failures) std::cerr << "warning: " << f << '\n';
    path = quantile_path(family, load_curve(a.x0_path));
  }
  emit(a.out, formatted(monotone_csv(path, a.weight), a.format));
}

void run_simulate(CLI::App* s, Args& a) {
  require(s, {"--seed"});
  SimDesign d;
  d.n = a.n;
  d.error_family = error_family_from_string(a.design);
  d.snr = a.snr;
  d.seed = a.seed;
  McOptions mc;
  mc.fit = fit_options(s, a);
  mc.fit.tuning.threads = 1;
  mc.shared_lambda = a.shared_lambda;
  mc.threads = resolve_threads(a.threads);
  const std::vector<double> taus = a.taus.empty() ? std::vector<double>{0.25, 0.5, 0.75} : a.taus;
  if (a.experiment == "sample") {
    require(s, {"--curves-out", "--y-out"});
    save_sample(generate(d).sample, a.curves_out, a.y_out);
    if (!a.x0_path.empty()) {
      const SimCurve x0 = generate_curve(d, 0);
      std::string csv;
      for (Index j = 0; j < x0.x.grid.size(); ++j) csv += (j ? "," : "") + io::format_double(x0.x.grid[j]);
      csv += '\n';
      for (Index j = 0; j < x0.x.grid.size(); ++j) csv += (j ? "," : "") + io::format_double(x0.x.values[j]);
      csv += '\n';
      io::write_file_atomic(a.x0_path, csv);
    }
    return;
  }
  McReport report;
  if (a.experiment == "mise") {
    std::vector<Method> methods;
    for (const auto& m : a.methods) {
      if (m == "rkhs") {
        methods.push_back(Method::Rkhs);
      } else if (m == "fpca") {
        methods.push_back(Method::Fpca);
      } else {
        throw UsageError("simulate: unknown method '" + m + "'");
      }
    }
    report = run_mise_experiment(d, taus, a.reps, methods, mc);
  } else {
    CoverageOptions co;
    co.mc = mc;
    co.level = a.level;
    co.n_eig = a.n_eig;
    co.basis_dim = a.basis_dim;
    co.scb_paths = a.scb_paths;
    const std::vector<double> t_points = a.t_points.empty() ? std::vector<double>{0.1, 0.5, 0.9} : a.t_points;
    report = run_coverage_experiment(d, taus, t_points, a.reps, a.with_x0, co);
  }
  std::cerr << "replicates " << report.replicates << ", failed " << report.failed_replicates << ", runtime "
            << report.runtime_seconds << " s\n";
  for (const auto& f : report.failures) std::cerr << "warning: " << f << '\n';
  if (!a.summary_out.empty()) io::write_file_atomic(a.summary_out, report.summary_json());
  emit(a.out, a.format == "json" ? report.summary_json() : report.records_csv());
}

void run_bench(CLI::App* s, Args& a) {
  require(s, {"--seed"});
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); };
  std::string csv = "replicate,stage,seconds\n";
  for (int r = 0; r < a.reps; ++r) {
    SimDesign d;
    d.n = a.n;
    d.error_family = error_family_from_string(a.design);
    d.snr = a.snr;
    d.seed = a.seed + static_cast<std::uint64_t>(r);
    auto t0 = clock::now();
    const SimSample sim = generate(d);
    const SobolevKernel kern(sim.sample.grid());
    const RepresenterGram gram = build_gram(sim.sample, kern);
    csv += std::to_string(r) + ",gram," + io::format_double(secs(t0)) + '\n';
    t0 = clock::now();
    FitOptions o = fit_options(s, a);
    o.h = rot_bandwidth(sim.sample, gram, a.tau);
    csv += std::to_string(r) + ",bandwidth," + io::format_double(secs(t0)) + '\n';
    t0 = clock::now();
    const FitResult f = fit(sim.sample, kern, gram, a.tau, o);
    csv += std::to_string(r) + ",fit," + io::format_double(secs(t0)) + '\n';
    t0 = clock::now();
    const EigenSystem es = solve_eigensystem(sim.sample, f.b_hat, a.n_eig, std::min<Index>(a.basis_dim, a.n));
    csv += std::to_string(r) + ",eigensystem," + io::format_double(secs(t0)) + '\n';
  }
  emit(a.out, formatted(csv, a.format));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed functional linear quantile regression with an RKHS penalty"};
  // Long-only help so that --h can name the bandwidth.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(flqr::kVersion));
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", a.config, "JSON file mirroring the flags; flags take precedence");
    s->add_option("--threads", a.threads, "Worker threads (0 = machine parallelism)")->capture_default_str();
    s->add_option("--out", a.out, "Output path (stdout when omitted)");
  };
  auto format = [&](CLI::App* s) {
    s->add_option("--format", a.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  };

  auto* fit_cmd = app.add_subcommand("fit", "Fit one quantile level; writes the fit JSON");
  common(fit_cmd);
  fit_cmd->add_option("--curves", a.curves, "Curves CSV (grid row first)");
  fit_cmd->add_option("--y", a.y, "Responses CSV");
  fit_cmd->add_option("--tau", a.tau, "Quantile level in (0,1)");
  add_fit_flags(fit_cmd, a);
  fit_cmd->add_option("--n-eig", a.n_eig, "Eigenpairs kept for inference")->capture_default_str();
  fit_cmd->add_option("--basis-dim", a.basis_dim, "B-spline dimension for the eigen-system (capped at n)")
      ->capture_default_str();
  fit_cmd->add_option("--beta-out", a.beta_out, "Also write beta_hat as CSV");
  fit_cmd->add_option("--cv-out", a.cv_out, "Also write the CV table as CSV");
  fit_cmd->add_option("--eig-out", a.eig_out, "Also write the eigen-system as CSV");

  auto* predict_cmd = app.add_subcommand("predict", "Conditional quantile predictions for new curves");
  common(predict_cmd);
  format(predict_cmd);
  predict_cmd->add_option("--fit", a.fit_path, "Fit JSON");
  predict_cmd->add_option("--curves", a.curves, "Curves CSV (grid row first)");

  auto* ci_cmd = app.add_subcommand("ci", "Pointwise confidence intervals for beta");
  common(ci_cmd);
  format(ci_cmd);
  ci_cmd->add_option("--fit", a.fit_path, "Fit JSON");
  ci_cmd->add_option("--level", a.level, "Confidence level")->capture_default_str();
  ci_cmd->add_option("--t", a.t_points, "Evaluation points (all grid points when omitted)")->delimiter(',');

  auto* scb_cmd = app.add_subcommand("scb", "Simultaneous confidence band for beta");
  common(scb_cmd);
  format(scb_cmd);
  scb_cmd->add_option("--fit", a.fit_path, "Fit JSON");
  scb_cmd->add_option("--level", a.level, "Confidence level")->capture_default_str();
  scb_cmd->add_option("--paths", a.paths, "Simulated Gaussian paths (>= 1000)")->capture_default_str();
  scb_cmd->add_option("--seed", a.seed, "Path seed (required)");

  auto* qci_cmd = app.add_subcommand("quantile-ci", "Confidence interval for the conditional quantile at x0");
  common(qci_cmd);
  qci_cmd->add_option("--fit", a.fit_path, "Fit JSON");
  qci_cmd->add_option("--x0", a.x0_path, "Curve CSV (grid row + one curve)");
  qci_cmd->add_option("--level", a.level, "Confidence level")->capture_default_str();

  auto* mono_cmd = app.add_subcommand("monotonize", "Monotone conditional-quantile path in tau");
  common(mono_cmd);
  format(mono_cmd);
  mono_cmd->add_option("--path", a.path_csv, "CSV with columns tau,value (skips fitting)");
  mono_cmd->add_option("--curves", a.curves, "Curves CSV (grid row first)");
  mono_cmd->add_option("--y", a.y, "Responses CSV");
  mono_cmd->add_option("--x0", a.x0_path, "Curve CSV (grid row + one curve)");
  mono_cmd->add_option("--taus", a.taus, "Quantile levels (default: 21 points on [0.1, 0.9])")->delimiter(',');
  mono_cmd->add_option("--weight", a.weight, "Weight of the rearranged path")->capture_default_str();
  mono_cmd->add_flag("--shared-lambda", a.shared_lambda, "Cross-validate lambda once at tau = 0.5");
  add_fit_flags(mono_cmd, a);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo MISE or coverage experiment");
  common(sim_cmd);
  format(sim_cmd);
  sim_cmd->add_option("--experiment", a.experiment, "Experiment; `sample` only writes one generated data set")
      ->check(CLI::IsMember({"mise", "coverage", "sample"}))
      ->capture_default_str();
  sim_cmd->add_option("--design", a.design, "Error family")
      ->check(CLI::IsMember({"normal", "t3"}))
      ->capture_default_str();
  sim_cmd->add_option("--snr", a.snr, "Signal-to-noise ratio")->capture_default_str();
  sim_cmd->add_option("--n", a.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--reps", a.reps, "Replicates")->capture_default_str();
  sim_cmd->add_option("--taus", a.taus, "Quantile levels (default 0.25,0.5,0.75)")->delimiter(',');
  sim_cmd->add_option("--methods", a.methods, "Methods for the MISE experiment")
      ->delimiter(',')
      ->capture_default_str();
  sim_cmd->add_option("--t", a.t_points, "Coverage evaluation points (default 0.1,0.5,0.9)")->delimiter(',');
  sim_cmd->add_flag("--x0", a.with_x0, "Also cover the conditional quantile at a fixed new curve");
  sim_cmd->add_option("--scb-paths", a.scb_paths, "Band paths per replicate (0 = no band)")->capture_default_str();
  sim_cmd->add_option("--level", a.level, "Confidence level")->capture_default_str();
  sim_cmd->add_option("--n-eig", a.n_eig, "Eigenpairs kept for inference")->capture_default_str();
  sim_cmd->add_option("--basis-dim", a.basis_dim, "B-spline dimension (capped at n)")->capture_default_str();
  sim_cmd->add_flag("--shared-lambda", a.shared_lambda, "Cross-validate lambda once at tau = 0.5 per replicate");
  sim_cmd->add_option("--summary-out", a.summary_out, "Also write the JSON summary");
  sim_cmd->add_option("--curves-out", a.curves_out, "sample: curves CSV path");
  sim_cmd->add_option("--y-out", a.y_out, "sample: responses CSV path");
  sim_cmd->add_option("--x0-out", a.x0_path, "sample: also write the fixed new curve used by coverage runs");
  add_fit_flags(sim_cmd, a);

  auto* bench_cmd = app.add_subcommand("bench", "Time the pipeline stages on simulated data");
  common(bench_cmd);
  format(bench_cmd);
  bench_cmd->add_option("--n", a.n, "Sample size")->capture_default_str();
  bench_cmd->add_option("--reps", a.reps, "Repetitions")->capture_default_str();
  bench_cmd->add_option("--tau", a.tau, "Quantile level")->capture_default_str();
  bench_cmd->add_option("--design", a.design, "Error family")
      ->check(CLI::IsMember({"normal", "t3"}))
      ->capture_default_str();
  bench_cmd->add_option("--snr", a.snr, "Signal-to-noise ratio")->capture_default_str();
  bench_cmd->add_option("--n-eig", a.n_eig, "Eigenpairs")->capture_default_str();
  bench_cmd->add_option("--basis-dim", a.basis_dim, "B-spline dimension")->capture_default_str();
  add_fit_flags(bench_cmd, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: UsageError: " << e.what() << '\n';
    return 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!a.config.empty()) apply_config(sub, a.config);
    const std::string name = sub->get_name();
    if (name == "fit") run_fit(sub, a);
    else if (name == "predict") run_predict(sub, a);
    else if (name == "ci") run_ci(sub, a);
    else if (name == "scb") run_scb(sub, a);
    else if (name == "quantile-ci") run_quantile_ci(sub, a);
    else if (name == "monotonize") run_monotonize(sub, a);
    else if (name == "simulate") run_simulate(sub, a);
    else run_bench(sub, a);
  } catch (const UsageError& e) {
    std::cerr << "error: UsageError: " << e.what() << '\n';
    return 1;
  } catch (const flqr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.numerical() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
