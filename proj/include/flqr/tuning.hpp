#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flqr/optimizer.hpp"
#include "flqr/rkhs.hpp"

namespace flqr {

/// How the penalty is picked from the CV table. Min takes the smallest mean
/// risk. OneSe takes the largest lambda whose mean risk is within one standard
/// error of that minimum; with held-out folds of a few dozen observations the
/// risk curve is flat and noisy and Min tends to chase the noise.
enum class CvRule { Min, OneSe };

std::string to_string(CvRule rule);
CvRule cv_rule_from_string(const std::string& name);

struct TuningConfig {
  std::vector<double> lambda_grid = default_lambda_grid();
  int folds = 5;
  std::uint64_t seed = 0;
  int threads = 1;
  CvRule rule = CvRule::OneSe;

  /// 13 log-spaced values from 1e-9 to 1e-3.
  static std::vector<double> default_lambda_grid();
  void validate(Index n) const;
};

/// Rule-of-thumb bandwidth 1.06 * s * n^(-1/5) with
/// s = min(residual SD, residual IQR / 1.39). Throws DegenerateBandwidth when s == 0.
double rot_from_residuals(const Vector& residuals, Index n);

/// Fits a pilot quantile regression of Y on the scores int X_i g_j with
/// g = {1, t - 1/2, xi_1, ..., xi_k}, k = min(n, 10), and applies
/// rot_from_residuals to its residuals. Needs n >= 10.
double rot_bandwidth(const FunctionalSample& sample, double tau, const SobolevKernel& kern);
double rot_bandwidth(const FunctionalSample& sample, const RepresenterGram& gram, double tau);

struct CvRow {
  double lambda = 0.0;
  double mean_risk = 0.0;
  double se_risk = 0.0;
  /// Folds whose fit failed; a nonzero count excludes the row from selection.
  int failed_folds = 0;
  std::string failure;
};

struct CvResult {
  double lambda_best = 0.0;
  std::vector<CvRow> table;
};

/// Fold labels in [0, folds): observations are ranked by response and each
/// consecutive block of `folds` ranks receives a seeded permutation of labels.
std::vector<int> stratified_folds(const Vector& response, int folds, std::uint64_t seed);

/// k-fold cross-validation of the penalty. Each fold fit is scored by the mean
/// smoothed loss on its held-out observations; the reported risk is the mean
/// of the per-fold means. Ties within 1e-12 relative risk go to the largest
/// lambda. Fold fits that diverge or stop at max_iter exclude their lambda;
/// TuningFailure when every lambda is excluded.
CvResult cross_validate_lambda(const FunctionalSample& sample, const RepresenterGram& gram, double tau, double h,
                               const TuningConfig& config, const GdConfig& gd = {});
CvResult cross_validate_lambda(const FunctionalSample& sample, double tau, double h, const TuningConfig& config,
                               const GdConfig& gd = {});

/// CSV with header lambda,mean_risk,se_risk.
std::string cv_table_csv(const CvResult& result);

/// Standard starting point: alpha at the empirical tau-quantile of y, zeros elsewhere.
Vector standard_init(const Vector& response, double tau, Index dim);

}  // namespace flqr
