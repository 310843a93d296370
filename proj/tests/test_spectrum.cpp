#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "flqr/spectrum.hpp"
#include "helpers.hpp"

using namespace flqr;
using flqr::test::kind_of;

namespace {

const SimSample& shared_sim() {
  static const SimSample s = flqr::test::sim(200, 1);
  return s;
}

// V(f, g) = (b/n) sum_i (int X_i f)(int X_i g) by grid quadrature.
Matrix v_form(const FunctionalSample& s, double b, const Matrix& f_on_grid, const Matrix& g_on_grid) {
  const Matrix w = s.curves() * s.grid().weights().asDiagonal();
  return (b / static_cast<double>(s.size())) * (w * f_on_grid).transpose() * (w * g_on_grid);
}

}  // namespace

TEST_CASE("B-spline basis") {
  CHECK(kind_of([] { BSplineBasis b(3); }) == ErrorKind::InvalidInput);
  BSplineBasis basis(12);
  const Vector t = Vector::LinSpaced(97, 0.0, 1.0);
  const Matrix b = basis.evaluate(t);
  for (Index j = 0; j < t.size(); ++j) CHECK(std::abs(b.row(j).sum() - 1.0) < 1e-14);
  const Vector lin = b * basis.linear_coefficients();
  CHECK((lin - t).cwiseAbs().maxCoeff() < 1e-14);
  const Vector one = b * basis.constant_coefficients();
  CHECK((one.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("penalty matrix") {
  for (Index dim : {4, 9, 50}) {
    BSplineBasis basis(dim);
    const Matrix p = penalty_matrix(basis);
    const double scale = p.cwiseAbs().maxCoeff();
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(p);
    CHECK(es.eigenvalues().minCoeff() > -1e-10 * scale);
    // J annihilates constants and lines.
    CHECK((p * basis.constant_coefficients()).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((p * basis.linear_coefficients()).cwiseAbs().maxCoeff() < 1e-8 * scale);
    const double jc = basis.linear_coefficients().dot(p * basis.linear_coefficients());
    CHECK(std::abs(jc) < 1e-8 * scale);

    // Second derivatives are piecewise linear: Gauss-Legendre per knot interval is exact.
    Matrix quad = Matrix::Zero(dim, dim);
    const Index intervals = dim - 3;
    const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
    const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                          0.2369268850561891};
    for (Index k = 0; k < intervals; ++k) {
      const double a = static_cast<double>(k) / intervals, b = static_cast<double>(k + 1) / intervals;
      Vector pts(5);
      for (int q = 0; q < 5; ++q) pts[q] = 0.5 * (a + b) + 0.5 * (b - a) * xs[q];
      const Matrix d2 = basis.second_derivative(pts);
      for (int q = 0; q < 5; ++q) quad += 0.5 * (b - a) * ws[q] * d2.row(q).transpose() * d2.row(q);
    }
    CHECK((quad - p).cwiseAbs().maxCoeff() < 1e-10 * scale);
  }
}

TEST_CASE("weighted covariance") {
  const Grid g = Grid::uniform(21);
  FunctionalSample ones(g, Matrix::Ones(1 + 1, 21), Vector::Zero(2));
  const Matrix c = weighted_covariance(ones, 0.7);
  CHECK((c.array() - 0.7).abs().maxCoeff() < 1e-15);

  SimDesign d;
  d.n = 5000;
  d.seed = 3;
  const auto big = generate(d);
  const Matrix cov = weighted_covariance(big.sample, 2.0);
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (Index j = 0; j < big.sample.grid().size(); j += 10) {
    const double t = big.sample.grid()[j];
    double pop = 0.0;
    for (int k = 1; k <= d.n_terms; ++k) pop += SimDesign::zeta(k) * SimDesign::zeta(k) * SimDesign::psi(k, t) * SimDesign::psi(k, t);
    CHECK(std::abs(cov(j, j) - 2.0 * pop) < 0.1 * 2.0 * pop);
  }
  CHECK(kind_of([&] { weighted_covariance(ones, 0.0); }) == ErrorKind::DomainError);
}

TEST_CASE("simultaneous diagonalization") {
  const auto& s = shared_sim().sample;
  const auto es = solve_eigensystem(s, 0.45, 30, 50);
  CHECK(es.n_eig() == 30);
  CHECK(es.rho[0] == 0.0);
  CHECK(es.rho[1] == 0.0);
  for (Index v = 1; v < 30; ++v) CHECK(es.rho[v] >= es.rho[v - 1]);
  CHECK(es.rho[2] > 0.0);
  const auto r = diagonalization_residuals(es, s);
  CHECK(r.v_offset < 1e-8);
  CHECK(r.j_offdiag < 1e-6 * (1.0 + es.rho.maxCoeff()));
  CHECK(r.j_diag < 1e-6 * (1.0 + es.rho.maxCoeff()));
  CHECK_FALSE(es.regularized);

  // Sign convention.
  for (Index v = 0; v < 30; ++v) {
    for (Index j = 0; j < es.phis.rows(); ++j) {
      if (std::abs(es.phis(j, v)) > 1e-6) {
        CHECK(es.phis(j, v) > 0.0);
        break;
      }
    }
  }
  // phi_at agrees with the grid values and scores with quadrature.
  CHECK((es.phi_at(s.grid()[37]) - es.phis.row(37).transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix scores = s.curves() * s.grid().weights().asDiagonal() * es.phis;
  CHECK((scores - es.scores).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((es.score_moments - scores.colwise().squaredNorm().transpose() / 200.0).cwiseAbs().maxCoeff() < 1e-10);

  CHECK(kind_of([&] { solve_eigensystem(s, 0.0, 30, 50); }) == ErrorKind::DomainError);
  CHECK(kind_of([&] { solve_eigensystem(s, 1.0, 60, 50); }) == ErrorKind::InvalidInput);
  FunctionalSample zero(s.grid(), Matrix::Zero(5, s.grid().size()), Vector::Zero(5));
  CHECK(kind_of([&] { solve_eigensystem(zero, 1.0, 5, 10); }) == ErrorKind::SpectrumFailure);
}

TEST_CASE("Parseval in the V inner product") {
  const auto& s = shared_sim().sample;
  const double b = 0.5;
  const auto es = solve_eigensystem(s, b, 20, 20);
  CounterRng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    Vector a(20);
    for (Index k = 0; k < 20; ++k) a[k] = rng.normal();
    const Vector beta = es.basis.evaluate(s.grid().points()) * a;
    const double vv = v_form(s, b, beta, beta)(0, 0);
    const Vector proj = v_form(s, b, beta, es.phis).row(0).transpose();
    CHECK(std::abs(proj.squaredNorm() - vv) < 1e-6 * vv);
  }
}

TEST_CASE("K_t reproduces phi_nu(t)") {
  const auto& s = shared_sim().sample;
  const double b = 0.45, lambda = 1e-3;
  const auto es = solve_eigensystem(s, b, 30, 50);
  const Matrix on_grid = es.basis.evaluate(s.grid().points());
  for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    const Vector phi_t = es.phi_at(t);
    const Vector shrink = (1.0 + lambda * es.rho.array()).inverse().matrix();
    const Vector kt_coeffs = es.coeffs * phi_t.cwiseProduct(shrink);
    const Vector kt = on_grid * kt_coeffs;
    const Vector pairing = v_form(s, b, kt, es.phis).row(0).transpose() +
                           lambda * (es.coeffs.transpose() * es.basis.penalty() * kt_coeffs);
    // Relative to the largest |phi_nu(t)|, which runs into the hundreds.
    CHECK((pairing - phi_t).cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, phi_t.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rho growth on a flat-spectrum covariate") {
  // White-noise curves make V close to a multiple of the L2 form, so rho_nu
  // follows the penalty's own nu^4 growth.
  CounterRng rng(5);
  const Grid g = Grid::uniform(201);
  Matrix x(400, 201);
  for (Index i = 0; i < 400; ++i)
    for (Index j = 0; j < 201; ++j) x(i, j) = rng.normal();
  FunctionalSample s(g, x, Vector::Zero(400));
  const auto es = solve_eigensystem(s, 1.0, 30, 40);
  // Least-squares slope of log rho on log nu over nu = 5..20.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (Index v = 4; v < 20; ++v, ++m) {
    const double lx = std::log(v + 1.0), ly = std::log(es.rho[v]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope >= 3.0);
  CHECK(slope <= 5.0);
}

TEST_CASE("W_lambda multipliers") {
  const auto es = solve_eigensystem(shared_sim().sample, 0.45, 10, 20);
  const Vector c = Vector::Ones(10);
  CHECK(w_lambda_apply(es, c, 0.0).cwiseAbs().maxCoeff() == 0.0);
  const Vector big = w_lambda_apply(es, c, 1e12);
  CHECK(big[0] == 0.0);
  CHECK(big[1] == 0.0);
  for (Index v = 2; v < 10; ++v) CHECK(big[v] == doctest::Approx(1.0).epsilon(1e-6));
  const Vector mid = w_lambda_apply(es, c, 1e-3);
  for (Index v = 2; v < 10; ++v) CHECK(mid[v] == doctest::Approx(1e-3 * es.rho[v] / (1 + 1e-3 * es.rho[v])));
  CHECK(kind_of([&] { w_lambda_apply(es, Vector::Ones(3), 1.0); }) == ErrorKind::DimensionMismatch);
}
