#include <algorithm>
#include <cmath>
#include <set>

#include "flqr/smoothing.hpp"
#include "flqr/stats.hpp"
#include "flqr/tuning.hpp"
#include "helpers.hpp"

using namespace flqr;
using flqr::test::kind_of;

TEST_CASE("rule-of-thumb formula") {
  // Two-point residuals with unit SD: IQR / 1.39 exceeds the SD, so s = 1.
  const Index n = 200;
  Vector r(n);
  for (Index i = 0; i < n; ++i) r[i] = i % 2 ? 1.0 : -1.0;
  r /= sample_sd(r);
  CHECK(std::abs(rot_from_residuals(r, n) - 1.06 * std::pow(200.0, -0.2)) < 1e-12);
  // The quoted 0.3678 is rounded loosely; the exact value is 0.36737.
  CHECK(std::abs(1.06 * std::pow(200.0, -0.2) - 0.3678) < 1e-3);
  CHECK(kind_of([] { rot_from_residuals(Vector::Constant(20, 3.0), 20); }) == ErrorKind::DegenerateBandwidth);
}

TEST_CASE("rot bandwidth scales with the response") {
  const auto sim = flqr::test::sim(100, 4);
  SobolevKernel kern(sim.sample.grid());
  const double h1 = rot_bandwidth(sim.sample, 0.5, kern);
  FunctionalSample scaled(sim.sample.grid(), sim.sample.curves(), 10.0 * sim.sample.responses());
  const double h10 = rot_bandwidth(scaled, 0.5, kern);
  CHECK(h1 > 0.0);
  CHECK(std::abs(h10 / h1 - 10.0) < 0.5);

  const auto small = flqr::test::random_sample(9, 21, 1);
  CHECK(kind_of([&] { rot_bandwidth(small, 0.5, SobolevKernel(small.grid())); }) == ErrorKind::InvalidInput);
}

TEST_CASE("stratified folds") {
  CounterRng rng(3);
  Vector y(53);
  for (Index i = 0; i < 53; ++i) y[i] = rng.normal();
  const auto labels = stratified_folds(y, 5, 11);
  CHECK(labels == stratified_folds(y, 5, 11));
  CHECK(labels != stratified_folds(y, 5, 12));
  std::vector<int> counts(5, 0);
  for (int l : labels) {
    REQUIRE(l >= 0);
    REQUIRE(l < 5);
    ++counts[static_cast<std::size_t>(l)];
  }
  for (int c : counts) CHECK((c == 10 || c == 11));
  // Every block of five consecutive ranks covers all five folds.
  std::vector<Index> order(53);
  for (Index i = 0; i < 53; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return y[a] < y[b]; });
  for (std::size_t b = 0; b + 5 <= 50; b += 5) {
    std::set<int> seen;
    for (std::size_t k = 0; k < 5; ++k) seen.insert(labels[static_cast<std::size_t>(order[b + k])]);
    CHECK(seen.size() == 5);
  }
}

TEST_CASE("cross-validation") {
  const auto sim = flqr::test::sim(60, 9);
  TuningConfig cfg;
  cfg.seed = 4;

  SUBCASE("single-lambda grid") {
    cfg.lambda_grid = {3e-3};
    const auto res = cross_validate_lambda(sim.sample, 0.5, 0.3, cfg);
    CHECK(res.lambda_best == 3e-3);
    REQUIRE(res.table.size() == 1);
    CHECK(std::isfinite(res.table[0].mean_risk));
  }
  SUBCASE("duplicates, determinism and thread independence") {
    cfg.lambda_grid = {1e-4, 1e-2, 1e-4};
    const auto a = cross_validate_lambda(sim.sample, 0.5, 0.3, cfg);
    CHECK(a.table[0].mean_risk == a.table[2].mean_risk);
    cfg.threads = 3;
    const auto b = cross_validate_lambda(sim.sample, 0.5, 0.3, cfg);
    for (std::size_t k = 0; k < a.table.size(); ++k) {
      CHECK(a.table[k].mean_risk == b.table[k].mean_risk);
      CHECK(a.table[k].se_risk == b.table[k].se_risk);
    }
    CHECK(a.lambda_best == b.lambda_best);
  }
  SUBCASE("risk is the mean of the fold means") {
    cfg.lambda_grid = {1e-3};
    cfg.folds = 4;
    const auto res = cross_validate_lambda(sim.sample, 0.5, 0.3, cfg);
    const auto labels = stratified_folds(sim.sample.responses(), 4, cfg.seed);
    SobolevKernel kern(sim.sample.grid());
    double sum = 0.0;
    for (int f = 0; f < 4; ++f) {
      std::vector<Index> train, test;
      for (Index i = 0; i < sim.sample.size(); ++i) (labels[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
      const auto tr = sim.sample.subset(train);
      const auto g = build_gram(tr, kern);
      const auto obj = representer_objective(g, tr.responses(), 0.5, 0.3, 1e-3);
      const auto fit = minimize(obj, standard_init(tr.responses(), 0.5, obj.dim()), GdConfig{});
      const Theta th = Theta::unpack(fit.theta, 2);
      const Vector beta = kern.null_basis() * th.d + g.xi_curves.transpose() * th.c;
      double loss = 0.0;
      for (Index i : test) {
        const double pred = th.alpha + integrate(sim.sample.grid(), sim.sample.curves().row(i).transpose().cwiseProduct(beta));
        loss += smoothed_loss(sim.sample.responses()[i] - pred, 0.5, 0.3);
      }
      sum += loss / static_cast<double>(test.size());
    }
    CHECK(std::abs(res.table[0].mean_risk - sum / 4.0) < 1e-9);
  }
  SUBCASE("selection rules") {
    cfg.lambda_grid = TuningConfig::default_lambda_grid();
    cfg.rule = CvRule::Min;
    const auto m = cross_validate_lambda(sim.sample, 0.5, 0.3, cfg);
    cfg.rule = CvRule::OneSe;
    const auto o = cross_validate_lambda(sim.sample, 0.5, 0.3, cfg);
    CHECK(o.lambda_best >= m.lambda_best);
    double best = INFINITY;
    for (const auto& row : m.table)
      if (row.failed_folds == 0) best = std::min(best, row.mean_risk);
    for (const auto& row : m.table) {
      if (row.lambda == m.lambda_best) CHECK(row.mean_risk <= best * (1 + 1e-12));
    }
  }
  SUBCASE("config validation") {
    cfg.lambda_grid = {};
    CHECK(kind_of([&] { cross_validate_lambda(sim.sample, 0.5, 0.3, cfg); }) == ErrorKind::InvalidInput);
    cfg.lambda_grid = {-1.0};
    CHECK(kind_of([&] { cross_validate_lambda(sim.sample, 0.5, 0.3, cfg); }) == ErrorKind::InvalidInput);
    cfg.lambda_grid = {1e-3};
    cfg.folds = 1;
    CHECK(kind_of([&] { cross_validate_lambda(sim.sample, 0.5, 0.3, cfg); }) == ErrorKind::InvalidInput);
  }
}

TEST_CASE("cv table csv and rule names") {
  CvResult r{1e-3, {{1e-3, 0.5, 0.01, 0, ""}}};
  CHECK(cv_table_csv(r) == "lambda,mean_risk,se_risk\n0.001,0.5,0.01\n");
  CHECK(cv_rule_from_string(to_string(CvRule::OneSe)) == CvRule::OneSe);
  CHECK(cv_rule_from_string("min") == CvRule::Min);
}

TEST_CASE("empirical quantile is type 7") {
  Vector v(5);
  v << 5.0, 1.0, 4.0, 2.0, 3.0;
  CHECK(empirical_quantile(v, 0.5) == 3.0);
  CHECK(empirical_quantile(v, 0.1) == doctest::Approx(1.4));
  CHECK(interquartile_range(v) == doctest::Approx(2.0));
}
