#pragma once

#include <optional>
#include <vector>

#include "flqr/funcdata.hpp"
#include "flqr/rkhs.hpp"

namespace flqr {

/// Representer coordinates: beta = sum_l d_l psi_l + sum_i c_i xi_i.
struct Theta {
  double alpha = 0.0;
  Vector d;
  Vector c;

  static Theta zeros(Index m, Index n) { return {0.0, Vector::Zero(m), Vector::Zero(n)}; }

  /// (alpha, d, c) stacked into one vector; the order used by the optimizer.
  Vector packed() const;
  static Theta unpack(const Eigen::Ref<const Vector>& v, Index m);
};

struct GdConfig {
  double tol = 1e-6;
  int max_iter = 10000;
  double gamma_cap = 100.0;
  double gamma0 = 1.0;
  /// Run the iteration in coordinates scaled by the RMS of each design column.
  bool standardize = true;

  void validate() const;
};

enum class FitStatus { Converged, MaxIterReached };

struct FitTrace {
  int iterations = 0;
  std::vector<double> objective_path;
  double final_grad_norm = 0.0;
  int safeguard_hits = 0;
  FitStatus status = FitStatus::MaxIterReached;
};

/// Smoothed quantile objective on a linear predictor,
///   Q(theta) = (1/n) sum_i l_h(y_i - z_i' theta; tau) + (lambda/2) b' P b,
/// where b is the trailing block of theta starting at penalty_offset.
/// The representer problem uses z_i = (1, N_i, Xi_i) and P = Xi.
class SmoothedObjective {
 public:
  SmoothedObjective(Matrix design, Vector response, double tau, double h, double lambda = 0.0, Matrix penalty = {},
                    Index penalty_offset = 0);

  Index dim() const { return design_.cols(); }
  Index observations() const { return design_.rows(); }
  double tau() const { return tau_; }
  double bandwidth() const { return h_; }
  double lambda() const { return lambda_; }
  const Matrix& design() const { return design_; }
  const Vector& response() const { return response_; }

  double value(const Eigen::Ref<const Vector>& theta) const;
  /// Fills grad and returns the objective value.
  double value_and_gradient(const Eigen::Ref<const Vector>& theta, Vector& grad) const;
  Vector residuals(const Eigen::Ref<const Vector>& theta) const;

 private:
  double penalty_value(const Eigen::Ref<const Vector>& theta, Vector* pen_grad) const;

  Matrix design_;
  Vector response_;
  double tau_;
  double h_;
  double lambda_;
  Matrix penalty_;
  Index penalty_offset_;
};

/// Objective of the representer-theorem problem for a sample's Gram matrices.
SmoothedObjective representer_objective(const RepresenterGram& gram, const Vector& response, double tau, double h,
                                        double lambda);

/// Q_h(theta) for the representer problem.
double objective(const Theta& theta, const RepresenterGram& gram, const FunctionalSample& sample, double tau, double h,
                 double lambda);

struct ThetaGradient {
  double alpha = 0.0;
  Vector d;
  Vector c;
};

ThetaGradient gradient(const Theta& theta, const RepresenterGram& gram, const FunctionalSample& sample, double tau,
                       double h, double lambda);

/// Barzilai-Borwein rates gamma1 = <d,d>/<d,g>, gamma2 = <d,g>/<g,g>.
struct BbRates {
  double gamma1;
  double gamma2;
};

/// Returns nullopt when <delta, g> == 0 (or the rates are not finite); the
/// caller falls back to a unit step.
std::optional<BbRates> bb_step(const Eigen::Ref<const Vector>& delta, const Eigen::Ref<const Vector>& g);

struct MinimizeResult {
  Vector theta;
  FitTrace trace;
};

/// Gradient descent with safeguarded BB steps: the first step uses gamma0, later
/// steps use min(gamma1, gamma2, gamma_cap) when gamma1 > 0 and 1 otherwise.
/// Stops once the gradient norm is at most tol. On MaxIterReached the iterate with
/// the smallest objective is returned. Throws DivergenceError on a non-finite
/// objective.
MinimizeResult minimize(const SmoothedObjective& objective, const Vector& init, const GdConfig& config);

/// RMS of each design column (1 for all-zero columns).
Vector column_scales(const Matrix& design);

}  // namespace flqr
