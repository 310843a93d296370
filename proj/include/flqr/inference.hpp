#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flqr/estimator.hpp"
#include "flqr/spectrum.hpp"

namespace flqr {

struct PointwiseCi {
  double t = 0.0;
  double tau = 0.5;
  double center = 0.0;
  double half_width = 0.0;
  double level = 0.95;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
};

struct Scb {
  double level = 0.95;
  double q_alpha = 0.0;
  GridFunction center;
  GridFunction lower;
  GridFunction upper;
  Index n_paths = 0;
  std::uint64_t seed = 0;
};

struct QuantileCi {
  GridFunction x0;
  double tau = 0.5;
  double center = 0.0;
  double half_width = 0.0;
  double level = 0.95;
  /// B_hat^-1 + sum_nu x0_nu^2 / (1 + lambda rho_nu)^2.
  double sigma2 = 0.0;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
};

/// Two-sided normal critical value z_{(1 - level)/2}. DomainError unless level in (0,1).
double z_critical(double level);

/// ConfigMismatch unless the eigen-system was built on the fit's grid, sample
/// size and sparsity estimate.
void check_compatible(const FitResult& fit, const EigenSystem& es);

/// sum_nu phi_nu(t)^2 / (1 + lambda rho_nu)^2.
double variance_sum(const EigenSystem& es, const Vector& phi_t, double lambda);

PointwiseCi pointwise_ci(const FitResult& fit, const EigenSystem& es, double t0, double level = 0.95);
/// pointwise_ci at every grid point.
std::vector<PointwiseCi> pointwise_band(const FitResult& fit, const EigenSystem& es, double level = 0.95);

/// Paths are simulated in chunks of 1000 with one RNG stream per chunk, so q_alpha
/// does not depend on the thread count. InsufficientPaths when n_paths < 1000.
Scb scb(const FitResult& fit, const EigenSystem& es, double level = 0.95, Index n_paths = 10000,
        std::uint64_t seed = 0, int threads = 1);

QuantileCi quantile_ci(const FitResult& fit, const EigenSystem& es, const GridFunction& x0, double level = 0.95);

struct InferenceDiagnostics {
  /// ||W_lambda beta_hat|| in the V-norm, a proxy for the unestimable bias.
  double bias_proxy = 0.0;
  /// Largest share, over grid points, of the variance sum carried by the upper
  /// half of the eigen-terms; large values mean n_eig is too small.
  double truncation_share = 0.0;
  bool truncation_flag = false;
};

InferenceDiagnostics inference_diagnostics(const FitResult& fit, const EigenSystem& es, const FunctionalSample& sample);

/// Columns t, center, lower, upper.
std::string ci_csv(const std::vector<PointwiseCi>& cis);
std::string scb_csv(const Scb& band);
std::string quantile_ci_json(const QuantileCi& ci);

}  // namespace flqr
