#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "flqr/rkhs.hpp"
#include "helpers.hpp"

using namespace flqr;
using flqr::test::kind_of;

namespace {

// Fourier series of the scaled Bernoulli polynomials on [0,1]:
//   k2(x) = 2 sum cos(2 pi k x) / (2 pi k)^2,  k4(x) = -2 sum cos(2 pi k x) / (2 pi k)^4.
double k2_series(double x) {
  double s = 0.0;
  for (int k = 200000; k >= 1; --k) {
    const double w = 2.0 * std::numbers::pi * k;
    s += std::cos(w * x) / (w * w);
  }
  return 2.0 * s;
}

double k4_series(double x) {
  double s = 0.0;
  for (int k = 20000; k >= 1; --k) {
    const double w = 2.0 * std::numbers::pi * k;
    s += std::cos(w * x) / (w * w * w * w);
  }
  return -2.0 * s;
}

// Second derivative in s of R1(t, s): k2(t) - k2(|s - t|).
double r1_dss(double t, double s) { return bernoulli_k2(t) - bernoulli_k2(std::abs(s - t)); }

// Exact int_0^1 f''g'' for f = R1(t,.), g = R1(u,.): piecewise polynomial pieces.
double h1_pairing(double t, double u) {
  const double a = std::min(t, u), b = std::max(t, u);
  auto f = [&](double s) { return r1_dss(t, s) * r1_dss(u, s); };
  return flqr::test::gauss5(f, 0.0, a) + flqr::test::gauss5(f, a, b) + flqr::test::gauss5(f, b, 1.0);
}

}  // namespace

TEST_CASE("Bernoulli polynomials") {
  CHECK(bernoulli_k1(0.0) == -0.5);
  CHECK(bernoulli_k2(0.0) == doctest::Approx(1.0 / 12.0));
  CHECK(bernoulli_k4(0.0) == doctest::Approx(-1.0 / 720.0));
  CHECK(std::abs(bernoulli_k4(0.37) - k4_series(0.37)) < 1e-14);
  CHECK(std::abs(bernoulli_k2(0.37) - k2_series(0.37)) < 1e-10);
}

TEST_CASE("kernel_r1 examples") {
  CHECK(kernel_r1(0.0, 0.0) == doctest::Approx(1.0 / 120.0).epsilon(1e-14));
  const double oracle = k2_series(0.3) * k2_series(0.7) - k4_series(0.4);
  CHECK(std::abs(kernel_r1(0.3, 0.7) - oracle) < 1e-8);
  CounterRng rng(3);
  for (int k = 0; k < 50; ++k) {
    const double s = rng.uniform(), t = rng.uniform();
    CHECK(kernel_r1(s, t) == kernel_r1(t, s));
  }
  CHECK(kind_of([] { kernel_r1(-0.1, 0.5); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { kernel_r1(0.5, 1.1); }) == ErrorKind::DomainError);
}

TEST_CASE("reproducing property in the penalized subspace") {
  // <R1(t,.), R1(u,.)>_1 = int R1''(t,s) R1''(u,s) ds must equal R1(t,u), and by
  // linearity <R1(t,.), f> = f(t) for f in the span of kernel sections.
  CounterRng rng(11);
  for (int k = 0; k < 20; ++k) {
    const double t = rng.uniform(), u = rng.uniform();
    CHECK(std::abs(h1_pairing(t, u) - kernel_r1(t, u)) < 1e-12);
  }
  const Grid g = Grid::uniform(201);
  Vector a(5);
  a << 0.3, -1.2, 2.0, 0.7, -0.4;
  const double nodes[5] = {0.05, 0.2, 0.5, 0.81, 0.97};
  for (Index j = 0; j < g.size(); j += 20) {
    double pairing = 0.0, f_t = 0.0;
    for (int k = 0; k < 5; ++k) {
      pairing += a[k] * h1_pairing(g[j], nodes[k]);
      f_t += a[k] * kernel_r1(nodes[k], g[j]);
    }
    CHECK(std::abs(pairing - f_t) < 1e-6);
  }
}

TEST_CASE("kernel matrix and null basis") {
  const Grid g = Grid::uniform(41);
  SobolevKernel kern(g);
  CHECK(kern.order() == 2);
  CHECK((kern.r1() - kern.r1().transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(kern.r1());
  CHECK(es.eigenvalues().minCoeff() > -1e-10 * kern.r1().norm());
  CHECK(kern.null_basis().cols() == 2);
  for (Index j = 0; j < g.size(); ++j) {
    CHECK(kern.null_basis()(j, 0) == 1.0);
    CHECK(kern.null_basis()(j, 1) == doctest::Approx(g[j] - 0.5));
  }
  CHECK(kind_of([&] { SobolevKernel k3(g, 3); }) == ErrorKind::DomainError);
}

TEST_CASE("xi functions") {
  const Grid g = Grid::uniform(51);
  SobolevKernel kern(g);
  Matrix x(3, 51);
  x.row(0).setZero();
  x.row(1).setOnes();
  x.row(2).setOnes();
  FunctionalSample s(g, x, Vector::LinSpaced(3, 0.0, 1.0));
  const Matrix xi = xi_functions(s, kern);
  CHECK(xi.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(xi.row(1) == xi.row(2));
  for (Index j = 0; j < 51; ++j) {
    double direct = 0.0;
    for (Index k = 0; k < 51; ++k) direct += g.weights()[k] * kernel_r1(g[j], g[k]);
    CHECK(std::abs(xi(1, j) - direct) < 1e-14);
  }
}

TEST_CASE("gram matrices") {
  const Grid g = Grid::uniform(101);
  SobolevKernel kern(g);
  SUBCASE("constant curve") {
    Matrix x = Matrix::Ones(2, 101);
    FunctionalSample s(g, x, Vector::Zero(2));
    const auto gram = build_gram(s, kern);
    double nested = 0.0;
    for (Index j = 0; j < 101; ++j)
      for (Index k = 0; k < 101; ++k) nested += g.weights()[j] * g.weights()[k] * kernel_r1(g[j], g[k]);
    CHECK(std::abs(gram.xi(0, 0) - nested) < 1e-8);
    // The exact double integral vanishes: both k2 and k4(|s - t|) integrate to 0.
    CHECK(std::abs(gram.xi(0, 0)) < 1e-6);
    CHECK(gram.n(0, 0) == doctest::Approx(1.0));
    CHECK(std::abs(gram.n(0, 1)) < 1e-14);
  }
  SUBCASE("symmetric PSD, S = Xi, relabeling") {
    const auto sample = flqr::test::random_sample(12, 101, 8);
    const auto gram = build_gram(sample, kern);
    CHECK((gram.xi - gram.xi.transpose()).norm() == 0.0);
    CHECK(gram.s == gram.xi);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram.xi);
    CHECK(es.eigenvalues().minCoeff() > -1e-10 * gram.xi.norm());

    std::vector<Index> perm = {5, 2, 11, 0, 1, 3, 4, 6, 7, 10, 9, 8};
    const auto pg = build_gram(sample.subset(perm), kern);
    for (Index i = 0; i < 12; ++i) {
      for (Index j = 0; j < 12; ++j) CHECK(std::abs(pg.xi(i, j) - gram.xi(perm[i], perm[j])) < 1e-15);
      CHECK(pg.n.row(i) == gram.n.row(perm[i]));
    }
  }
}
