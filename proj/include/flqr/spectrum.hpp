#pragma once

#include "flqr/funcdata.hpp"

namespace flqr {

/// Cubic B-splines with uniform knot spacing 1/(dim - 3) on [0,1], extended
/// uniformly past both ends so every basis function is a shifted cardinal spline.
class BSplineBasis {
 public:
  /// Throws InvalidInput unless dim >= 4.
  explicit BSplineBasis(Index dim);

  Index dim() const { return dim_; }
  double spacing() const { return spacing_; }

  /// Rows = points, columns = basis functions.
  Matrix evaluate(const Eigen::Ref<const Vector>& points) const;
  Matrix second_derivative(const Eigen::Ref<const Vector>& points) const;
  Eigen::RowVectorXd evaluate(double t) const;

  /// Exact Gram matrix of second derivatives, int B_i'' B_j'' over [0,1].
  Matrix penalty() const;

  /// Coefficients reproducing 1 and t exactly.
  Vector constant_coefficients() const;
  Vector linear_coefficients() const;

 private:
  Index dim_;
  double spacing_;
};

/// Penalty Gram of the basis (cubic splines, second-derivative roughness).
Matrix penalty_matrix(const BSplineBasis& basis);

/// B_hat/n sum_i X_i(s_j) X_i(s_k): the plug-in weighted covariance on the grid.
Matrix weighted_covariance(const FunctionalSample& sample, double b_hat);

/// Basis functions phi_nu with V(phi_mu, phi_nu) = delta and
/// J(phi_mu, phi_nu) = rho_nu delta, where V is the quadratic form of the
/// plug-in weighted covariance and J the second-derivative penalty.
struct EigenSystem {
  Grid grid;
  BSplineBasis basis;
  /// Nondecreasing, nonnegative.
  Vector rho;
  /// basis.dim() x n_eig coefficients of phi_nu.
  Matrix coeffs;
  /// p x n_eig; column nu = phi_nu on the grid.
  Matrix phis;
  /// n x n_eig; entry (i, nu) = int X_i phi_nu.
  Matrix scores;
  /// (1/n) sum_i (int X_i phi_nu)^2.
  Vector score_moments;
  double b_hat = 0.0;
  Index n = 0;
  /// True when n_eig reached into directions V cannot see, so a ridge set
  /// their (very large) rho.
  bool regularized = false;
  /// V and J in the spline basis (kept for diagnostics).
  Matrix v_matrix;
  Matrix j_matrix;

  Index n_eig() const { return rho.size(); }
  /// phi_nu(t) for all nu at an arbitrary t in [0,1].
  Vector phi_at(double t) const;
};

/// Solves J w = rho V w in a cubic B-spline basis and returns the n_eig pairs
/// with the smallest rho. Constants and lines are split off exactly (rho = 0).
/// On the rest, V is whitened through an SVD of the score matrix (int X_i B_k);
/// directions with V-mass below 1e-12 trace(V) have infinite rho and are
/// eliminated through J. A ridge of 1e-10 trace(V)/K only enters if n_eig asks
/// for more functions than remain. Throws SpectrumFailure if V is zero or
/// singular on constants and lines.
EigenSystem solve_eigensystem(const FunctionalSample& sample, double b_hat, Index n_eig, Index basis_dim);

/// Multiplies coefficient nu by lambda rho_nu / (1 + lambda rho_nu).
Vector w_lambda_apply(const EigenSystem& es, const Eigen::Ref<const Vector>& beta_coeffs, double lambda);

/// Max-norm residuals of the two diagonalization identities, measured with the
/// sample's quadrature scores and the exact penalty.
struct DiagonalizationResiduals {
  double v_offset;  ///< max |Phi' V Phi - I|
  double j_offdiag; ///< max off-diagonal |Phi' J Phi|
  double j_diag;    ///< max |diag(Phi' J Phi) - rho|
};
DiagonalizationResiduals diagonalization_residuals(const EigenSystem& es, const FunctionalSample& sample);

}  // namespace flqr
