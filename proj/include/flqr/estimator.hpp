#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flqr/optimizer.hpp"
#include "flqr/rkhs.hpp"
#include "flqr/tuning.hpp"

namespace flqr {

struct FitOptions {
  /// Bandwidth; rule-of-thumb when unset.
  std::optional<double> h;
  /// Penalty; cross-validated when unset.
  std::optional<double> lambda;
  TuningConfig tuning;
  GdConfig gd;
};

struct FitResult {
  double tau = 0.5;
  Theta theta;
  double lambda = 0.0;
  double h = 0.0;
  GridFunction beta_hat;
  double alpha_hat = 0.0;
  /// Y_i - alpha_hat - int X_i beta_hat.
  Vector residuals;
  /// Estimated residual density at the residual tau-quantile.
  double b_hat = 0.0;
  FitTrace trace;
  /// Empty when lambda was supplied.
  std::vector<CvRow> cv_table;

  Index n() const { return residuals.size(); }
};

/// Fits one quantile level. Missing h / lambda are tuned by the rule of thumb
/// and cross-validation; the optimizer starts from the standard init.
FitResult fit(const FunctionalSample& sample, double tau, const FitOptions& options = {});
/// Same, reusing an already built kernel and Gram.
FitResult fit(const FunctionalSample& sample, const SobolevKernel& kern, const RepresenterGram& gram, double tau,
              const FitOptions& options = {});

/// beta on the grid: sum_l d_l psi_l + sum_i c_i xi_i.
Vector assemble_beta(const Theta& theta, const SobolevKernel& kern, const RepresenterGram& gram);

/// alpha_hat + int x beta_hat.
double predict(const FitResult& fit, const GridFunction& x);

/// Gaussian KDE (Silverman bandwidth) of the residuals at their empirical
/// tau-quantile, floored at 1e-6.
double estimate_sparsity(const Vector& residuals, double tau);

struct FamilyOptions {
  FitOptions fit;
  /// Cross-validate lambda once at tau = 0.5 and reuse it for every level.
  bool shared_lambda = false;
  /// Compute one rule-of-thumb bandwidth at tau = 0.5 and reuse it.
  bool shared_h = false;
  int threads = 1;
};

struct QuantileCurveFamily {
  std::vector<double> taus;
  /// nullopt where the level failed; see failures.
  std::vector<std::optional<FitResult>> fits;
  std::vector<std::string> failures;
};

/// Independent fits over an increasing tau grid inside (0,1). Duplicate or
/// unsorted levels throw InvalidTauGrid; the call fails only if every level fails.
QuantileCurveFamily fit_family(const FunctionalSample& sample, const std::vector<double>& taus,
                               const FamilyOptions& options = {});

void validate_tau_grid(const std::vector<double>& taus);

}  // namespace flqr
