#include "flqr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>
#include <sstream>

#include "flqr/error.hpp"

namespace flqr {

namespace {

// Cardinal cubic B-spline on [0,4] and its second derivative.
double cardinal(double u) {
  if (u <= 0.0 || u >= 4.0) return 0.0;
  if (u < 1.0) return u * u * u / 6.0;
  if (u < 2.0) return (((-3.0 * u + 12.0) * u - 12.0) * u + 4.0) / 6.0;
  if (u < 3.0) return (((3.0 * u - 24.0) * u + 60.0) * u - 44.0) / 6.0;
  const double v = 4.0 - u;
  return v * v * v / 6.0;
}

double cardinal_dd(double u) {
  if (u <= 0.0 || u >= 4.0) return 0.0;
  if (u < 1.0) return u;
  if (u < 2.0) return 4.0 - 3.0 * u;
  if (u < 3.0) return 3.0 * u - 8.0;
  return 4.0 - u;
}

}  // namespace

BSplineBasis::BSplineBasis(Index dim) : dim_(dim), spacing_(0.0) {
  if (dim < 4) fail(ErrorKind::InvalidInput, "cubic B-spline basis needs dim >= 4");
  spacing_ = 1.0 / static_cast<double>(dim - 3);
}

Eigen::RowVectorXd BSplineBasis::evaluate(double t) const {
  Eigen::RowVectorXd row(dim_);
  for (Index i = 0; i < dim_; ++i) row[i] = cardinal(t / spacing_ - static_cast<double>(i - 3));
  return row;
}

Matrix BSplineBasis::evaluate(const Eigen::Ref<const Vector>& points) const {
  Matrix out(points.size(), dim_);
  for (Index j = 0; j < points.size(); ++j) out.row(j) = evaluate(points[j]);
  return out;
}

Matrix BSplineBasis::second_derivative(const Eigen::Ref<const Vector>& points) const {
  Matrix out(points.size(), dim_);
  const double scale = 1.0 / (spacing_ * spacing_);
  for (Index j = 0; j < points.size(); ++j) {
    for (Index i = 0; i < dim_; ++i) out(j, i) = scale * cardinal_dd(points[j] / spacing_ - static_cast<double>(i - 3));
  }
  return out;
}

Matrix BSplineBasis::penalty() const {
  // Second derivatives are linear on each knot interval, so Simpson's rule on
  // each interval integrates their products exactly.
  Matrix pen = Matrix::Zero(dim_, dim_);
  const Index intervals = dim_ - 3;
  Vector nodes(3);
  for (Index a = 0; a < intervals; ++a) {
    const double left = static_cast<double>(a) * spacing_;
    nodes << left, left + 0.5 * spacing_, left + spacing_;
    const Matrix dd = second_derivative(nodes);
    pen.noalias() += (spacing_ / 6.0) * (dd.row(0).transpose() * dd.row(0) + 4.0 * dd.row(1).transpose() * dd.row(1) +
                                         dd.row(2).transpose() * dd.row(2));
  }
  return 0.5 * (pen + pen.transpose());
}

Vector BSplineBasis::constant_coefficients() const { return Vector::Ones(dim_); }

Vector BSplineBasis::linear_coefficients() const {
  // Greville abscissae of uniform cubic splines: knot t_i shifted by 2 spacings.
  Vector c(dim_);
  for (Index i = 0; i < dim_; ++i) c[i] = static_cast<double>(i - 1) * spacing_;
  return c;
}

Matrix penalty_matrix(const BSplineBasis& basis) { return basis.penalty(); }

Matrix weighted_covariance(const FunctionalSample& sample, double b_hat) {
  if (!(b_hat > 0.0)) fail(ErrorKind::DomainError, "b_hat must be positive");
  const Index p = sample.curves().cols();
  Matrix c = Matrix::Zero(p, p);
  c.selfadjointView<Eigen::Lower>().rankUpdate(sample.curves().transpose(), b_hat / static_cast<double>(sample.size()));
  return c.selfadjointView<Eigen::Lower>();
}

Vector EigenSystem::phi_at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::DomainError, "t must lie in [0,1]");
  return (basis.evaluate(t) * coeffs).transpose();
}

EigenSystem solve_eigensystem(const FunctionalSample& sample, double b_hat, Index n_eig, Index basis_dim) {
  if (!(b_hat > 0.0)) fail(ErrorKind::DomainError, "b_hat must be positive");
  if (n_eig < 1 || n_eig > basis_dim) {
    fail(ErrorKind::InvalidInput, "n_eig must lie in [1, basis_dim]; got " + std::to_string(n_eig));
  }
  const Index n = sample.size();
  BSplineBasis basis(basis_dim);
  const Matrix on_grid = basis.evaluate(sample.grid().points());
  // Scaled scores: V = A' A with A(i,k) = sqrt(b/n) int X_i B_k.
  const Matrix scores = sample.curves() * sample.grid().weights().asDiagonal() * on_grid;
  const Matrix a = std::sqrt(b_hat / static_cast<double>(n)) * scores;

  const Matrix v_full = a.transpose() * a;
  const double trace = v_full.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) fail(ErrorKind::SpectrumFailure, "weighted covariance is zero");
  const Matrix pen = basis.penalty();

  // The null space of J (constants and lines) is known exactly. V-orthonormalize
  // it and split it off, so its eigenvalues are exactly zero and the remaining
  // functions are V-orthogonal to it by construction.
  Matrix null_coeffs(basis_dim, 2);
  null_coeffs << basis.constant_coefficients(), basis.linear_coefficients();
  const Matrix null_gram = null_coeffs.transpose() * v_full * null_coeffs;
  Eigen::LLT<Matrix> null_llt(null_gram);
  if (null_llt.info() != Eigen::Success || !(null_gram.diagonal().minCoeff() > 1e-12 * trace)) {
    fail(ErrorKind::SpectrumFailure, "V is singular on constants and lines");
  }
  const Matrix null_phi = null_llt.matrixL().solve(null_coeffs.transpose()).transpose();
  Eigen::HouseholderQR<Matrix> qr(v_full * null_phi);
  const Matrix z = Matrix(qr.householderQ()).rightCols(basis_dim - 2);

  // On the complement, split directions by their V-mass through the SVD of A Z.
  // Directions below 1e-12 trace(V) are invisible to the data. They carry
  // infinite rho, and a finite eigenfunction w satisfies D' J w = 0 there, so
  // they are eliminated by a Schur complement of J.
  Eigen::BDCSVD<Matrix> svd(a * z, Eigen::ComputeFullV);
  const Index m = basis_dim - 2;
  Vector s2 = Vector::Zero(m);
  s2.head(svd.singularValues().size()) = svd.singularValues().array().square().matrix();
  Index keep = 0;
  while (keep < m && s2[keep] >= 1e-12 * trace) ++keep;
  const Index drop = m - keep;
  const Matrix zv = z * svd.matrixV();
  const Matrix jz = zv.transpose() * pen * zv;
  const Matrix jdd = jz.bottomRightCorner(drop, drop);
  const Matrix jdk = jz.bottomLeftCorner(drop, keep);

  Eigen::LDLT<Matrix> jdd_ldlt(jdd);
  if (drop > 0 && jdd_ldlt.info() != Eigen::Success) fail(ErrorKind::SpectrumFailure, "penalty is singular on V-null directions");
  const Matrix elim = drop > 0 ? Matrix(-jdd_ldlt.solve(jdk)) : Matrix(0, keep);
  const Vector inv_s = s2.head(keep).cwiseSqrt().cwiseInverse();
  Matrix schur = jz.topLeftCorner(keep, keep);
  if (drop > 0) schur += jdk.transpose() * elim;
  Matrix mk = inv_s.asDiagonal() * schur * inv_s.asDiagonal();
  mk = 0.5 * (mk + mk.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(mk);
  if (es.info() != Eigen::Success) fail(ErrorKind::SpectrumFailure, "eigen solver did not converge");
  const Matrix wk = inv_s.asDiagonal() * es.eigenvectors();

  Matrix vecs(basis_dim, basis_dim);
  Vector rho(basis_dim);
  vecs.leftCols(2) = null_phi;
  vecs.middleCols(2, keep) = zv.leftCols(keep) * wk;
  if (drop > 0) vecs.middleCols(2, keep) += zv.rightCols(drop) * (elim * wk);
  rho << 0.0, 0.0, es.eigenvalues().cwiseMax(0.0), Vector::Zero(drop);
  if (drop > 0) {
    // The eliminated directions still carry a sliver of V-mass; a Rayleigh-Ritz
    // pass on the finite block restores exact V-orthonormality.
    const Matrix y = vecs.middleCols(2, keep);
    const Matrix vy = y.transpose() * v_full * y;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> rr(y.transpose() * pen * y, 0.5 * (vy + vy.transpose()));
    if (rr.info() != Eigen::Success) fail(ErrorKind::SpectrumFailure, "Rayleigh-Ritz refinement failed");
    vecs.middleCols(2, keep) = y * rr.eigenvectors();
    rho.segment(2, keep) = rr.eigenvalues().cwiseMax(0.0);
  }

  // Only when more functions are requested than the data can see does the
  // ridge 1e-10 trace(V)/K enter, giving the invisible directions finite rho.
  const bool regularized = n_eig > 2 + keep;
  Matrix v_used = v_full;
  if (regularized) {
    const double ridge = 1e-10 * trace / static_cast<double>(basis_dim);
    Eigen::SelfAdjointEigenSolver<Matrix> esd(jdd);
    vecs.rightCols(drop) = zv.rightCols(drop) * esd.eigenvectors() / std::sqrt(ridge);
    rho.tail(drop) = esd.eigenvalues().cwiseMax(0.0) / ridge;
    v_used += ridge * zv.rightCols(drop) * zv.rightCols(drop).transpose();
    std::vector<Index> order(static_cast<std::size_t>(basis_dim));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return rho[i] < rho[j]; });
    const Matrix unsorted = vecs;
    const Vector unsorted_rho = rho;
    for (Index k = 0; k < basis_dim; ++k) {
      vecs.col(k) = unsorted.col(order[static_cast<std::size_t>(k)]);
      rho[k] = unsorted_rho[order[static_cast<std::size_t>(k)]];
    }
  }
  if (!vecs.leftCols(n_eig).allFinite()) {
    std::ostringstream msg;
    msg << "V is singular; singular value range [" << s2.minCoeff() << ", " << s2.maxCoeff() << "]";
    fail(ErrorKind::SpectrumFailure, msg.str());
  }

  EigenSystem out{sample.grid(), basis, {}, {}, {}, {}, {}, b_hat, n, regularized, {}, {}};
  out.rho = rho.head(n_eig);
  out.coeffs = vecs.leftCols(n_eig);
  out.phis = on_grid * out.coeffs;
  // Sign convention: positive at the first grid point where |phi| > 1e-6.
  for (Index v = 0; v < n_eig; ++v) {
    for (Index j = 0; j < out.phis.rows(); ++j) {
      if (std::abs(out.phis(j, v)) > 1e-6) {
        if (out.phis(j, v) < 0.0) {
          out.phis.col(v) *= -1.0;
          out.coeffs.col(v) *= -1.0;
        }
        break;
      }
    }
  }
  out.scores = scores * out.coeffs;
  out.score_moments = out.scores.colwise().squaredNorm().transpose() / static_cast<double>(n);
  out.v_matrix = v_used;
  out.j_matrix = pen;
  if (!out.coeffs.allFinite()) fail(ErrorKind::SpectrumFailure, "non-finite eigenvectors");
  return out;
}

Vector w_lambda_apply(const EigenSystem& es, const Eigen::Ref<const Vector>& beta_coeffs, double lambda) {
  if (beta_coeffs.size() != es.n_eig()) fail(ErrorKind::DimensionMismatch, "coefficient vector length != n_eig");
  if (!(lambda >= 0.0)) fail(ErrorKind::DomainError, "lambda must be nonnegative");
  const Eigen::ArrayXd lr = lambda * es.rho.array();
  return (beta_coeffs.array() * lr / (1.0 + lr)).matrix();
}

DiagonalizationResiduals diagonalization_residuals(const EigenSystem& es, const FunctionalSample& sample) {
  require_same_grid(es.grid, sample.grid());
  const Matrix scores = sample.curves() * sample.grid().weights().asDiagonal() * es.phis;
  const Matrix v = (es.b_hat / static_cast<double>(sample.size())) * (scores.transpose() * scores);
  const Matrix j = es.coeffs.transpose() * es.basis.penalty() * es.coeffs;
  const Index k = es.n_eig();
  Matrix joff = j;
  joff.diagonal().setZero();
  return {(v - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), joff.cwiseAbs().maxCoeff(),
          (j.diagonal() - es.rho).cwiseAbs().maxCoeff()};
}

}  // namespace flqr
