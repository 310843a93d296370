#include <cmath>
#include <numbers>

#include "flqr/optimizer.hpp"
#include "flqr/tuning.hpp"
#include "helpers.hpp"

using namespace flqr;
using flqr::test::kind_of;

namespace {

struct Problem {
  FunctionalSample sample;
  RepresenterGram gram;
  Theta theta;
  double tau, h, lambda;
};

Problem random_problem(std::uint64_t seed) {
  CounterRng rng(seed, 99);
  const Index n = 5 + static_cast<Index>(rng.uniform() * 15);
  auto sample = flqr::test::random_sample(n, 51, seed);
  SobolevKernel kern(sample.grid());
  auto gram = build_gram(sample, kern);
  Theta th = Theta::zeros(2, n);
  th.alpha = rng.normal();
  for (Index l = 0; l < 2; ++l) th.d[l] = rng.normal();
  for (Index i = 0; i < n; ++i) th.c[i] = rng.normal() * 10.0;
  return {std::move(sample), std::move(gram), th, rng.uniform(0.05, 0.95), rng.uniform(0.05, 1.0),
          std::pow(10.0, rng.uniform(-6.0, -1.0))};
}

}  // namespace

TEST_CASE("objective examples") {
  auto sample = flqr::test::random_sample(8, 51, 2);
  FunctionalSample zero_y(sample.grid(), sample.curves(), Vector::Zero(8));
  SobolevKernel kern(sample.grid());
  const auto gram = build_gram(zero_y, kern);
  const Theta zero = Theta::zeros(2, 8);
  CHECK(std::abs(objective(zero, gram, zero_y, 0.3, 0.2, 1.0) - 0.2 / std::sqrt(2 * std::numbers::pi)) < 1e-15);
  // c = 0: the penalty vanishes whatever lambda is.
  Theta th = zero;
  th.alpha = 0.4;
  th.d << 1.0, -2.0;
  CHECK(objective(th, gram, zero_y, 0.3, 0.2, 1e-3) == objective(th, gram, zero_y, 0.3, 0.2, 1e6));
  // Doubling lambda doubles the penalty.
  th.c = Vector::LinSpaced(8, -1.0, 1.0);
  const double base = objective(th, gram, zero_y, 0.3, 0.2, 0.0);
  const double p1 = objective(th, gram, zero_y, 0.3, 0.2, 0.5) - base;
  const double p2 = objective(th, gram, zero_y, 0.3, 0.2, 1.0) - base;
  CHECK(p1 > 0.0);
  CHECK(std::abs(p2 - 2.0 * p1) < 1e-12 * std::abs(p2));
  CHECK(std::abs(p1 - 0.25 * th.c.dot(gram.xi * th.c)) < 1e-12 * p1);

  Theta wrong = Theta::zeros(2, 7);
  CHECK(kind_of([&] { objective(wrong, gram, zero_y, 0.3, 0.2, 1.0); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("gradient matches central differences") {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto p = random_problem(seed);
    const auto g = gradient(p.theta, p.gram, p.sample, p.tau, p.h, p.lambda);
    Vector packed = p.theta.packed();
    Vector analytic(packed.size());
    analytic << g.alpha, g.d, g.c;
    const auto obj = representer_objective(p.gram, p.sample.responses(), p.tau, p.h, p.lambda);
    Vector fd(packed.size());
    for (Index k = 0; k < packed.size(); ++k) {
      const double e = 1e-6 * std::max(1.0, std::abs(packed[k]));
      Vector a = packed, b = packed;
      a[k] += e;
      b[k] -= e;
      fd[k] = (obj.value(a) - obj.value(b)) / (2 * e);
    }
    worst = std::max(worst, (fd - analytic).norm() / std::max(analytic.norm(), 1e-12));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("gradient limit for large positive residuals") {
  auto sample = flqr::test::random_sample(10, 51, 4);
  FunctionalSample big(sample.grid(), sample.curves(), Vector::Constant(10, 1e6));
  SobolevKernel kern(big.grid());
  const auto gram = build_gram(big, kern);
  const auto g = gradient(Theta::zeros(2, 10), gram, big, 0.3, 0.1, 1e-3);
  CHECK(std::abs(g.alpha + 0.3) < 1e-15);
}

TEST_CASE("bb_step cases") {
  Vector g(3);
  g << 1.0, -2.0, 0.5;
  auto r = bb_step(g, g);
  REQUIRE(r);
  CHECK(r->gamma1 == doctest::Approx(1.0));
  CHECK(r->gamma2 == doctest::Approx(1.0));
  r = bb_step(2.0 * g, g);
  REQUIRE(r);
  CHECK(r->gamma1 == doctest::Approx(2.0));
  CHECK(r->gamma2 == doctest::Approx(2.0));
  Vector perp(3);
  perp << 2.0, 1.0, 0.0;
  CHECK_FALSE(bb_step(perp, g).has_value());
  CHECK(kind_of([&] { bb_step(Vector::Ones(2), g); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("quadratic regime converges to the normal-equation solution") {
  // With h far above the residual scale l_h is quadratic to O(u^4 / h^3), so the
  // minimizer solves (Z'Z / (n h sqrt(2 pi)) + lambda P) theta = Z'(y - ...) / ...
  CounterRng rng(8);
  const Index n = 40, k = 4;
  Matrix z(n, k);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    z(i, 0) = 1.0;
    for (Index j = 1; j < k; ++j) z(i, j) = rng.normal();
    y[i] = 0.5 + z(i, 1) - 0.3 * z(i, 2) + 0.1 * rng.normal();
  }
  const double h = 1e3, tau = 0.5, lambda = 1e-3;
  Matrix pen = Matrix::Identity(k - 1, k - 1);
  SmoothedObjective obj(z, y, tau, h, lambda, pen, 1);
  const auto quick = minimize(obj, Vector::Zero(k), GdConfig{});
  CHECK(quick.trace.status == FitStatus::Converged);
  CHECK(quick.trace.iterations < 200);
  GdConfig cfg;
  cfg.tol = 1e-10;
  const auto res = minimize(obj, Vector::Zero(k), cfg);
  CHECK(res.trace.status == FitStatus::Converged);

  const double curv = 1.0 / (h * std::sqrt(2 * std::numbers::pi));
  Matrix a = curv / n * z.transpose() * z;
  a.bottomRightCorner(k - 1, k - 1) += lambda * pen;
  const Vector b = curv / n * z.transpose() * y;
  const Vector exact = a.ldlt().solve(b);
  CHECK((res.theta - exact).norm() < 1e-4 * exact.norm());
}

TEST_CASE("minimize from the optimum stops immediately") {
  auto sample = flqr::test::random_sample(15, 51, 6);
  SobolevKernel kern(sample.grid());
  const auto gram = build_gram(sample, kern);
  const auto obj = representer_objective(gram, sample.responses(), 0.5, 0.5, 1e-2);
  GdConfig cfg;
  const auto first = minimize(obj, standard_init(sample.responses(), 0.5, obj.dim()), cfg);
  REQUIRE(first.trace.status == FitStatus::Converged);
  const auto again = minimize(obj, first.theta, cfg);
  CHECK(again.trace.status == FitStatus::Converged);
  CHECK(again.trace.iterations <= 1);
  CHECK(again.trace.objective_path.size() <= 2);
}

TEST_CASE("symmetric data give a zero intercept at the median") {
  auto half = flqr::test::random_sample(10, 51, 12);
  Matrix x(20, 51);
  Vector y(20);
  x.topRows(10) = half.curves();
  x.bottomRows(10) = -half.curves();
  y.head(10) = half.responses();
  y.tail(10) = -half.responses();
  FunctionalSample s(half.grid(), x, y);
  SobolevKernel kern(s.grid());
  const auto gram = build_gram(s, kern);
  const auto obj = representer_objective(gram, y, 0.5, 0.3, 1e-2);
  const auto res = minimize(obj, standard_init(y, 0.5, obj.dim()), GdConfig{});
  CHECK(res.trace.status == FitStatus::Converged);
  CHECK(std::abs(res.theta[0]) < 1e-4);
  // Brute-force scan over alpha with d = c = 0 is minimized at 0 as well.
  double best_a = 1.0, best_f = INFINITY;
  for (int k = -1000; k <= 1000; ++k) {
    Vector th = Vector::Zero(obj.dim());
    th[0] = k * 1e-4;
    const double f = obj.value(th);
    if (f < best_f) {
      best_f = f;
      best_a = th[0];
    }
  }
  CHECK(std::abs(best_a) < 1e-4);
}

TEST_CASE("minimize is deterministic, improves the objective and reports stationarity") {
  const auto sim = flqr::test::sim(60, 5);
  SobolevKernel kern(sim.sample.grid());
  const auto gram = build_gram(sim.sample, kern);
  for (double tau : {0.25, 0.5, 0.75}) {
    const auto obj = representer_objective(gram, sim.sample.responses(), tau, 0.3, 1e-3);
    const Vector init = standard_init(sim.sample.responses(), tau, obj.dim());
    const auto a = minimize(obj, init, GdConfig{});
    const auto b = minimize(obj, init, GdConfig{});
    CHECK(a.theta == b.theta);
    CHECK(a.trace.objective_path == b.trace.objective_path);
    CHECK(a.trace.objective_path.back() <= a.trace.objective_path.front());
    if (a.trace.status == FitStatus::Converged) {
      Vector g;
      obj.value_and_gradient(a.theta, g);
      CHECK(g.norm() <= 1e-6);
      CHECK(a.trace.final_grad_norm <= 1e-6);
    }
  }
}

TEST_CASE("config validation and divergence") {
  GdConfig bad;
  bad.tol = 0.0;
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::InvalidInput);
  bad = {};
  bad.max_iter = 0;
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::InvalidInput);

  Matrix z = Matrix::Ones(3, 1);
  Vector y(3);
  y << 1.0, 2.0, 3.0;
  SmoothedObjective obj(z, y, 0.5, 0.1);
  Vector init(1);
  init << std::nan("");
  CHECK(kind_of([&] { minimize(obj, init, GdConfig{}); }) == ErrorKind::DivergenceError);
}
