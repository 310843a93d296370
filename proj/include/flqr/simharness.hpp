#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flqr/estimator.hpp"
#include "flqr/funcdata.hpp"

namespace flqr {

enum class ErrorFamily { Normal, StudentT3 };

std::string to_string(ErrorFamily family);
ErrorFamily error_family_from_string(const std::string& name);

/// Cosine-expansion design: X_i = sum_k zeta_k u_ik psi_k with
/// zeta_k = 4 (-1)^(k+1) k^-2, psi_1 = 1, psi_k = sqrt(2) cos((k-1) pi t),
/// u_ik iid uniform on [-sqrt 3, sqrt 3]; Y_i = alpha + int X_i beta + sigma eps_i
/// with beta(t) = exp(-t).
struct SimDesign {
  Index n = 200;
  int n_terms = 50;
  ErrorFamily error_family = ErrorFamily::Normal;
  double snr = 10.0;
  double alpha_true = 0.1;
  Index grid_size = 101;
  std::uint64_t seed = 1;

  void validate() const;

  static double zeta(int k);
  /// psi_k on [0,1], k >= 1.
  static double psi(int k, double t);
  /// Exact int_0^1 psi_k(t) exp(-t) dt.
  static double beta_coefficient(int k);
  static double beta_true(double t) { return std::exp(-t); }

  /// Var(int X beta) of the population design.
  double signal_variance() const;
  /// Variance of the unit error draw (1 for normal, 3 for t3).
  double error_variance() const;
  /// sigma = sqrt(signal_variance / (snr * error_variance)).
  double sigma() const;
  /// tau-quantile of sigma * eps.
  double error_quantile(double tau) const;

  GridFunction beta_on(const Grid& grid) const;
};

/// Generated sample plus the truth needed to score it.
struct SimSample {
  FunctionalSample sample;
  GridFunction beta_true;
  double alpha_true;
  double sigma;
  /// int X_i beta for each curve (exact).
  Vector signal;
};

/// Deterministic in design.seed.
SimSample generate(const SimDesign& design);

struct SimCurve {
  GridFunction x;
  /// Exact int x beta.
  double signal;
};

/// A single new covariate curve from the design, drawn from `stream` of the seed.
SimCurve generate_curve(const SimDesign& design, std::uint64_t stream);

/// alpha + signal + sigma * F_eps^{-1}(tau).
double true_conditional_quantile(const SimDesign& design, double signal, double tau);

/// int (beta_hat - beta_true)^2.
double mise(const GridFunction& beta_hat, const GridFunction& beta_true);

struct FpcaFit {
  double tau = 0.5;
  double h = 0.0;
  int n_components = 0;
  double alpha_hat = 0.0;
  GridFunction beta_hat;
  std::vector<std::string> warnings;
};

/// Functional-PCA baseline: eigenfunctions of the empirical covariance, smoothed
/// quantile regression (no penalty) of Y on the leading scores, beta_hat
/// assembled from the score loadings. n_components <= 0 selects by 99%
/// fraction of variance explained, capped at 20.
FpcaFit fpca_baseline_fit(const FunctionalSample& sample, double tau, int n_components = 0,
                          std::optional<double> h = std::nullopt, const GdConfig& gd = {});

struct McRecord {
  int replicate = 0;
  std::string method;
  double tau = 0.0;
  std::string metric;
  double value = 0.0;
};

struct McSummary {
  std::string method;
  double tau = 0.0;
  std::string metric;
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
};

struct McReport {
  std::string experiment;
  std::vector<McRecord> records;
  std::vector<McSummary> summary;
  int replicates = 0;
  int failed_replicates = 0;
  std::vector<std::string> failures;
  double runtime_seconds = 0.0;
  std::string config_json;

  /// Mean of a summarized metric; throws InvalidInput if absent.
  const McSummary& find(const std::string& method, double tau, const std::string& metric) const;
  /// Long-format CSV: replicate,method,tau,metric,value.
  std::string records_csv() const;
  std::string summary_json() const;
};

struct McOptions {
  FitOptions fit;
  /// Reuse the tau = 0.5 cross-validated lambda for every level.
  bool shared_lambda = false;
  int threads = 1;
};

enum class Method { Rkhs, Fpca };

/// Per replicate r the sample uses seed design.seed + r; both methods are fit at
/// every tau and MISE recorded. Failed replicates are excluded and counted.
McReport run_mise_experiment(const SimDesign& design, const std::vector<double>& taus, int n_replicates,
                             const std::vector<Method>& methods, const McOptions& options = {});

struct CoverageOptions {
  McOptions mc;
  double level = 0.95;
  int n_eig = 30;
  int basis_dim = 50;
  /// Simultaneous band paths per replicate; 0 skips the band.
  int scb_paths = 0;
  /// Forces infinitely wide intervals (harness self-check).
  bool force_infinite_width = false;
};

/// Per replicate: fit each tau, build the eigen-system, form pointwise CIs at
/// t_points (metric "cover_t=<t>") and, when with_x0, the conditional-quantile CI
/// at a covariate curve fixed once from the design seed (metric "cover_q").
McReport run_coverage_experiment(const SimDesign& design, const std::vector<double>& taus,
                                 const std::vector<double>& t_points, int n_replicates, bool with_x0,
                                 const CoverageOptions& options = {});

}  // namespace flqr
