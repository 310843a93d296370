#pragma once

#include "flqr/funcdata.hpp"

namespace flqr {

/// Scaled Bernoulli polynomials k_r(x) = B_r(x) / r! on [0,1].
double bernoulli_k1(double x);
double bernoulli_k2(double x);
double bernoulli_k4(double x);

/// Reproducing kernel of the penalized subspace of the second-order Sobolev
/// space under the norm (int f)^2 + (int f')^2 + int (f'')^2:
///   R1(s,t) = k2(s) k2(t) - k4(|s - t|).
/// Throws DomainError outside [0,1]^2.
double kernel_r1(double s, double t);

/// Kernel matrix and null-space basis evaluated on a grid.
class SobolevKernel {
 public:
  /// Only order 2 is implemented; other orders throw DomainError.
  explicit SobolevKernel(Grid grid, int order = 2);

  int order() const { return order_; }
  const Grid& grid() const { return grid_; }
  /// p x p matrix of R1(t_j, t_k).
  const Matrix& r1() const { return r1_; }
  /// p x m matrix; column l is the null-space function psi_l on the grid
  /// ({1, t - 1/2} for order 2).
  const Matrix& null_basis() const { return null_basis_; }

 private:
  int order_;
  Grid grid_;
  Matrix r1_;
  Matrix null_basis_;
};

/// Quantities entering the reduced objective.
///   xi(i,j)  = J(xi_i, xi_j) = iint X_i(s) R1(s,t) X_j(t)
///   s        = <xi_i, xi_j> in the full Sobolev norm; equal to xi because every
///              xi_i lies in the penalized subspace
///   n(i,l)   = int X_i psi_l
///   xi_curves row i = xi_i on the grid
struct RepresenterGram {
  Matrix xi;
  Matrix s;
  Matrix n;
  Matrix xi_curves;
};

/// Rows are xi_i(t) = int R1(t,s) X_i(s) ds on the grid (trapezoid in s).
Matrix xi_functions(const FunctionalSample& sample, const SobolevKernel& kern);

RepresenterGram build_gram(const FunctionalSample& sample, const SobolevKernel& kern);

}  // namespace flqr
