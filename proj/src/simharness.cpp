#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <json.hpp>

#include "flqr/error.hpp"
#include "flqr/inference.hpp"
#include "flqr/io.hpp"
#include "flqr/parallel.hpp"
#include "flqr/simharness.hpp"
#include "flqr/smoothing.hpp"
#include "flqr/spectrum.hpp"
#include "flqr/stats.hpp"

namespace flqr {

FpcaFit fpca_baseline_fit(const FunctionalSample& sample, double tau, int n_components, std::optional<double> h,
                          const GdConfig& gd) {
  detail::check_tau(tau);
  const Index n = sample.size();
  if (n_components >= n) fail(ErrorKind::InvalidInput, "n_components must be below the sample size");
  const Grid& grid = sample.grid();
  const Vector sw = grid.weights().cwiseSqrt();
  const Vector mean = sample.curves().colwise().mean().transpose();
  const Matrix centered = sample.curves().rowwise() - mean.transpose();

  // Covariance operator in quadrature-symmetrized form W^1/2 C W^1/2.
  const Matrix scaled = centered * sw.asDiagonal();
  Matrix op = scaled.transpose() * scaled / static_cast<double>(n);
  op = 0.5 * (op + op.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(op);
  if (eig.info() != Eigen::Success) fail(ErrorKind::SpectrumFailure, "covariance eigen-solve failed");
  const Vector values = eig.eigenvalues().reverse();
  const Matrix vectors = eig.eigenvectors().rowwise().reverse();
  const double total = values.cwiseMax(0.0).sum();
  if (!(total > 0.0)) fail(ErrorKind::InvalidInput, "curves have zero variance");

  std::vector<std::string> warnings;
  Index k = n_components;
  if (k <= 0) {
    double acc = 0.0;
    k = 0;
    while (k < values.size() && acc < 0.99 * total) acc += std::max(values[k++], 0.0);
    k = std::min<Index>({k, 20, n - 1});
  }
  Index usable = 0;
  while (usable < k && values[usable] > 1e-12 * total) ++usable;
  if (usable < k) {
    warnings.push_back("rank deficiency: reduced components from " + std::to_string(k) + " to " +
                           std::to_string(usable));
    k = usable;
  }
  if (k < 1) fail(ErrorKind::InvalidInput, "no usable principal components");

  // L2-orthonormal eigenfunctions on the grid and their scores.
  const Matrix phis = sw.cwiseInverse().asDiagonal() * vectors.leftCols(k);
  const Matrix scores = centered * grid.weights().asDiagonal() * phis;
  Matrix design(n, 1 + k);
  design.col(0).setOnes();
  design.rightCols(k) = scores;

  const double bw = h ? *h : rot_bandwidth(sample, tau, SobolevKernel(grid));
  SmoothedObjective obj(std::move(design), sample.responses(), tau, bw);
  const auto res = minimize(obj, standard_init(sample.responses(), tau, obj.dim()), gd);
  if (res.trace.status != FitStatus::Converged) warnings.push_back("optimizer reached max_iter");
  GridFunction beta{grid, phis * res.theta.tail(k)};
  const double alpha = res.theta[0] - integrate(grid, mean.cwiseProduct(beta.values));
  return {tau, bw, static_cast<int>(k), alpha, std::move(beta), std::move(warnings)};
}

const McSummary& McReport::find(const std::string& method, double tau, const std::string& metric) const {
  for (const auto& s : summary) {
    if (s.method == method && s.tau == tau && s.metric == metric) return s;
  }
  fail(ErrorKind::InvalidInput, "no summary for " + method + " tau=" + io::format_double(tau) + " " + metric);
}

std::string McReport::records_csv() const {
  std::string out = "replicate,method,tau,metric,value\n";
  for (const auto& r : records) {
    out += std::to_string(r.replicate) + ',' + r.method + ',' + io::format_double(r.tau) + ',' + r.metric + ',' +
           io::format_double(r.value) + '\n';
  }
  return out;
}

std::string McReport::summary_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["replicates"] = replicates;
  j["failed_replicates"] = failed_replicates;
  j["failures"] = failures;
  j["config"] = config_json.empty() ? nlohmann::ordered_json::object() : nlohmann::ordered_json::parse(config_json);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : summary) {
    rows.push_back({{"method", s.method}, {"tau", s.tau}, {"metric", s.metric}, {"mean", s.mean}, {"se", s.se},
                    {"count", s.count}});
  }
  j["summary"] = rows;
  return j.dump(2) + '\n';
}

namespace {

std::string method_name(Method m) { return m == Method::Rkhs ? "rkhs" : "fpca"; }

void summarize(McReport& report) {
  // Keyed by first appearance so the summary order follows the records.
  std::vector<std::tuple<std::string, double, std::string>> keys;
  std::map<std::tuple<std::string, double, std::string>, std::vector<double>> values;
  for (const auto& r : report.records) {
    auto key = std::make_tuple(r.method, r.tau, r.metric);
    auto [it, inserted] = values.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(r.value);
  }
  for (const auto& key : keys) {
    const auto& v = values[key];
    const Vector x = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    McSummary s{std::get<0>(key), std::get<1>(key), std::get<2>(key), x.mean(), 0.0, static_cast<int>(v.size())};
    if (v.size() > 1) s.se = sample_sd(x) / std::sqrt(static_cast<double>(v.size()));
    report.summary.push_back(s);
  }
}

struct ReplicateOutcome {
  std::vector<McRecord> records;
  std::string failure;
};

void collect(McReport& report, std::vector<ReplicateOutcome>& outcomes) {
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (!outcomes[r].failure.empty()) {
      ++report.failed_replicates;
      report.failures.push_back("replicate " + std::to_string(r) + ": " + outcomes[r].failure);
      continue;
    }
    for (auto& rec : outcomes[r].records) report.records.push_back(std::move(rec));
  }
  summarize(report);
}

nlohmann::ordered_json design_json(const SimDesign& d) {
  return {{"n", d.n},         {"n_terms", d.n_terms},       {"error_family", to_string(d.error_family)},
          {"snr", d.snr},     {"alpha_true", d.alpha_true}, {"grid_size", d.grid_size},
          {"seed", d.seed},   {"sigma", d.sigma()}};
}

nlohmann::ordered_json options_json(const McOptions& o) {
  nlohmann::ordered_json j;
  j["lambda_grid"] = o.fit.tuning.lambda_grid;
  j["folds"] = o.fit.tuning.folds;
  j["cv_rule"] = to_string(o.fit.tuning.rule);
  if (o.fit.lambda) j["lambda"] = *o.fit.lambda;
  if (o.fit.h) j["h"] = *o.fit.h;
  j["shared_lambda"] = o.shared_lambda;
  j["tol"] = o.fit.gd.tol;
  j["max_iter"] = o.fit.gd.max_iter;
  return j;
}

/// Fits every tau on one replicate, honoring shared_lambda. The fold seed is the
/// replicate's seed so each replicate is reproducible on its own.
std::vector<FitResult> fit_levels(const FunctionalSample& sample, const SobolevKernel& kern,
                                  const RepresenterGram& gram, const std::vector<double>& taus,
                                  const McOptions& options, std::uint64_t seed) {
  FitOptions fo = options.fit;
  fo.tuning.seed = seed;
  fo.tuning.threads = 1;
  if (options.shared_lambda && !fo.lambda) {
    const double h = fo.h ? *fo.h : rot_bandwidth(sample, gram, 0.5);
    fo.lambda = cross_validate_lambda(sample, gram, 0.5, h, fo.tuning, fo.gd).lambda_best;
  }
  std::vector<FitResult> fits;
  for (double tau : taus) fits.push_back(fit(sample, kern, gram, tau, fo));
  return fits;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

McReport run_mise_experiment(const SimDesign& design, const std::vector<double>& taus, int n_replicates,
                             const std::vector<Method>& methods, const McOptions& options) {
  design.validate();
  validate_tau_grid(taus);
  if (n_replicates < 1) fail(ErrorKind::InvalidInput, "n_replicates must be at least 1");
  if (methods.empty()) fail(ErrorKind::InvalidInput, "no methods requested");
  const auto start = std::chrono::steady_clock::now();

  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(n_replicates));
  parallel_for(outcomes.size(), options.threads, [&](std::size_t r) {
    auto& out = outcomes[r];
    try {
      SimDesign d = design;
      d.seed = design.seed + r;
      const SimSample sim = generate(d);
      const SobolevKernel kern(sim.sample.grid());
      const RepresenterGram gram = build_gram(sim.sample, kern);
      std::vector<FitResult> fits;
      for (Method m : methods) {
        if (m == Method::Rkhs) fits = fit_levels(sim.sample, kern, gram, taus, options, d.seed);
      }
      for (Method m : methods) {
        for (std::size_t j = 0; j < taus.size(); ++j) {
          double value;
          if (m == Method::Rkhs) {
            value = mise(fits[j].beta_hat, sim.beta_true);
          } else {
            const std::optional<double> h = fits.empty() ? options.fit.h : std::optional<double>(fits[j].h);
            value = mise(fpca_baseline_fit(sim.sample, taus[j], 0, h, options.fit.gd).beta_hat, sim.beta_true);
          }
          out.records.push_back({static_cast<int>(r), method_name(m), taus[j], "mise", value});
        }
      }
    } catch (const Error& e) {
      out.failure = e.what();
    }
  });

  McReport report;
  report.experiment = "mise";
  report.replicates = n_replicates;
  collect(report, outcomes);
  nlohmann::ordered_json cfg;
  cfg["design"] = design_json(design);
  cfg["taus"] = taus;
  cfg["replicates"] = n_replicates;
  auto names = nlohmann::ordered_json::array();
  for (Method m : methods) names.push_back(method_name(m));
  cfg["methods"] = names;
  cfg["options"] = options_json(options);
  report.config_json = cfg.dump();
  report.runtime_seconds = elapsed(start);
  return report;
}

McReport run_coverage_experiment(const SimDesign& design, const std::vector<double>& taus,
                                 const std::vector<double>& t_points, int n_replicates, bool with_x0,
                                 const CoverageOptions& options) {
  design.validate();
  validate_tau_grid(taus);
  if (n_replicates < 1) fail(ErrorKind::InvalidInput, "n_replicates must be at least 1");
  for (double t : t_points) {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::DomainError, "t points must lie in [0,1]");
  }
  const auto start = std::chrono::steady_clock::now();
  // The new observation is fixed across replicates.
  const SimCurve x0 = generate_curve(design, 0);

  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(n_replicates));
  parallel_for(outcomes.size(), options.mc.threads, [&](std::size_t r) {
    auto& out = outcomes[r];
    const int rep = static_cast<int>(r);
    try {
      SimDesign d = design;
      d.seed = design.seed + r;
      const SimSample sim = generate(d);
      const SobolevKernel kern(sim.sample.grid());
      const RepresenterGram gram = build_gram(sim.sample, kern);
      const auto fits = fit_levels(sim.sample, kern, gram, taus, options.mc, d.seed);
      for (const auto& f : fits) {
        const EigenSystem es = solve_eigensystem(sim.sample, f.b_hat, options.n_eig,
                                                 std::min<Index>(options.basis_dim, sim.sample.size()));
        for (double t : t_points) {
          const PointwiseCi ci = pointwise_ci(f, es, t, options.level);
          const double truth = SimDesign::beta_true(t);
          const bool covered = options.force_infinite_width || std::abs(ci.center - truth) <= ci.half_width;
          out.records.push_back({rep, "rkhs", f.tau, "cover_t=" + io::format_double(t), covered ? 1.0 : 0.0});
          out.records.push_back({rep, "rkhs", f.tau, "halfwidth_t=" + io::format_double(t), ci.half_width});
        }
        if (with_x0) {
          const QuantileCi qc = quantile_ci(f, es, x0.x, options.level);
          const double truth = true_conditional_quantile(design, x0.signal, f.tau);
          const bool covered = options.force_infinite_width || std::abs(qc.center - truth) <= qc.half_width;
          out.records.push_back({rep, "rkhs", f.tau, "cover_q", covered ? 1.0 : 0.0});
          out.records.push_back({rep, "rkhs", f.tau, "halfwidth_q", qc.half_width});
        }
        if (options.scb_paths > 0) {
          const Scb band = scb(f, es, options.level, options.scb_paths, d.seed);
          const bool covered =
              options.force_infinite_width ||
              ((band.lower.values.array() <= sim.beta_true.values.array()) &&
               (sim.beta_true.values.array() <= band.upper.values.array()))
                  .all();
          out.records.push_back({rep, "rkhs", f.tau, "cover_scb", covered ? 1.0 : 0.0});
        }
      }
    } catch (const Error& e) {
      out.failure = e.what();
    }
  });

  McReport report;
  report.experiment = "coverage";
  report.replicates = n_replicates;
  collect(report, outcomes);
  nlohmann::ordered_json cfg;
  cfg["design"] = design_json(design);
  cfg["taus"] = taus;
  cfg["t_points"] = t_points;
  cfg["replicates"] = n_replicates;
  cfg["with_x0"] = with_x0;
  cfg["level"] = options.level;
  cfg["n_eig"] = options.n_eig;
  cfg["basis_dim"] = options.basis_dim;
  cfg["scb_paths"] = options.scb_paths;
  cfg["options"] = options_json(options.mc);
  report.config_json = cfg.dump();
  report.runtime_seconds = elapsed(start);
  return report;
}

}  // namespace flqr
