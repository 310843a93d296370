#include "flqr/rkhs.hpp"

#include <cmath>

#include "flqr/error.hpp"

namespace flqr {

double bernoulli_k1(double x) { return x - 0.5; }

double bernoulli_k2(double x) {
  const double k1 = x - 0.5;
  return 0.5 * (k1 * k1 - 1.0 / 12.0);
}

double bernoulli_k4(double x) {
  const double k1 = x - 0.5;
  const double sq = k1 * k1;
  return (sq * sq - 0.5 * sq + 7.0 / 240.0) / 24.0;
}

double kernel_r1(double s, double t) {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) {
    fail(ErrorKind::DomainError, "kernel_r1 arguments must lie in [0,1]");
  }
  return bernoulli_k2(s) * bernoulli_k2(t) - bernoulli_k4(std::abs(s - t));
}

SobolevKernel::SobolevKernel(Grid grid, int order) : order_(order), grid_(std::move(grid)) {
  if (order_ != 2) fail(ErrorKind::DomainError, "only Sobolev order m = 2 is supported");
  const Index p = grid_.size();
  const Vector& t = grid_.points();
  r1_.resize(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index k = 0; k <= j; ++k) {
      r1_(j, k) = r1_(k, j) = kernel_r1(t[j], t[k]);
    }
  }
  null_basis_.resize(p, 2);
  null_basis_.col(0).setOnes();
  null_basis_.col(1) = t.array() - 0.5;
}

Matrix xi_functions(const FunctionalSample& sample, const SobolevKernel& kern) {
  require_same_grid(sample.grid(), kern.grid());
  // One product per curve, so identical curves give bit-identical rows.
  const Matrix weighted = sample.curves() * sample.grid().weights().asDiagonal();
  Matrix out(weighted.rows(), kern.r1().cols());
  for (Index i = 0; i < weighted.rows(); ++i) out.row(i).noalias() = kern.r1().transpose() * weighted.row(i).transpose();
  return out;
}

RepresenterGram build_gram(const FunctionalSample& sample, const SobolevKernel& kern) {
  RepresenterGram g;
  g.xi_curves = xi_functions(sample, kern);
  const auto weighted = sample.curves() * sample.grid().weights().asDiagonal();
  g.xi = g.xi_curves * weighted.transpose();
  // Symmetrize away rounding so downstream quadratic forms are exact.
  g.xi = 0.5 * (g.xi + g.xi.transpose()).eval();
  g.s = g.xi;
  g.n = weighted * kern.null_basis();
  return g;
}

}  // namespace flqr
