#include "flqr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "flqr/error.hpp"
#include "flqr/io.hpp"
#include "flqr/parallel.hpp"
#include "flqr/rng.hpp"
#include "flqr/smoothing.hpp"
#include "flqr/stats.hpp"

namespace flqr {

std::vector<double> TuningConfig::default_lambda_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) grid.push_back(std::pow(10.0, -9.0 + 0.5 * k));
  return grid;
}

void TuningConfig::validate(Index n) const {
  if (lambda_grid.empty()) fail(ErrorKind::InvalidInput, "lambda grid is empty");
  for (double l : lambda_grid) {
    if (!(l > 0.0) || !std::isfinite(l)) fail(ErrorKind::InvalidInput, "lambda grid entries must be positive");
  }
  if (folds < 2 || folds > n) {
    fail(ErrorKind::InvalidInput, "folds must lie in [2, n]; got " + std::to_string(folds));
  }
}

Vector standard_init(const Vector& response, double tau, Index dim) {
  Vector init = Vector::Zero(dim);
  init[0] = empirical_quantile(response, tau);
  return init;
}

double rot_from_residuals(const Vector& residuals, Index n) {
  const double sd = sample_sd(residuals);
  const double iqr = interquartile_range(residuals) / 1.39;
  const double s = std::min(sd, iqr);
  const double scale = std::max(1.0, residuals.cwiseAbs().maxCoeff());
  if (!(s > 1e-12 * scale)) fail(ErrorKind::DegenerateBandwidth, "pilot residual scale is zero");
  return 1.06 * s * std::pow(static_cast<double>(n), -0.2);
}

double rot_bandwidth(const FunctionalSample& sample, const RepresenterGram& gram, double tau) {
  detail::check_tau(tau);
  const Index n = sample.size();
  if (n < 10) fail(ErrorKind::InvalidInput, "rule-of-thumb bandwidth needs n >= 10");
  const Vector& y = sample.responses();
  const double sd_y = sample_sd(y);
  if (!(sd_y > 0.0)) fail(ErrorKind::DegenerateBandwidth, "responses are constant");

  const Index m = gram.n.cols();
  const Index k = std::min<Index>(n, 10);
  Matrix scores(n, m + k);
  scores << gram.n, gram.xi.leftCols(k);
  Matrix design(n, 1 + m + k);
  design.col(0).setOnes();
  for (Index j = 0; j < m + k; ++j) {
    const double mean = scores.col(j).mean();
    const double sd = sample_sd(scores.col(j));
    design.col(1 + j) = sd > 0.0 ? Vector((scores.col(j).array() - mean) / sd) : Vector::Zero(n);
  }

  // Pilot bandwidth from the raw response scale; one pass is enough for a
  // residual scale estimate.
  const double h0 = 1.06 * sd_y * std::pow(static_cast<double>(n), -0.2);
  SmoothedObjective pilot(std::move(design), y, tau, h0, 1e-8, Matrix::Identity(m + k, m + k), 1);
  GdConfig gd;
  gd.max_iter = 5000;
  const auto result = minimize(pilot, standard_init(y, tau, pilot.dim()), gd);
  return rot_from_residuals(pilot.residuals(result.theta), n);
}

double rot_bandwidth(const FunctionalSample& sample, double tau, const SobolevKernel& kern) {
  return rot_bandwidth(sample, build_gram(sample, kern), tau);
}

std::vector<int> stratified_folds(const Vector& response, int folds, std::uint64_t seed) {
  const Index n = response.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return response[a] < response[b]; });

  CounterRng rng(seed, 0xF01D);
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<int> perm(static_cast<std::size_t>(folds));
  for (Index start = 0; start < n; start += folds) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int j = folds - 1; j > 0; --j) {
      const auto r = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(j + 1));
      std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(r)]);
    }
    for (Index k = start; k < std::min<Index>(start + folds, n); ++k) {
      labels[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = perm[static_cast<std::size_t>(k - start)];
    }
  }
  return labels;
}

namespace {

Matrix rows_cols(const Matrix& a, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = a(rows[i], cols[j]);
    }
  }
  return out;
}

Matrix representer_design(const RepresenterGram& gram, const std::vector<Index>& rows,
                          const std::vector<Index>& basis) {
  const Index m = gram.n.cols();
  Matrix design(static_cast<Index>(rows.size()), 1 + m + static_cast<Index>(basis.size()));
  design.col(0).setOnes();
  for (std::size_t i = 0; i < rows.size(); ++i) design.row(static_cast<Index>(i)).segment(1, m) = gram.n.row(rows[i]);
  design.rightCols(static_cast<Index>(basis.size())) = rows_cols(gram.s, rows, basis);
  return design;
}

struct FoldOutcome {
  double risk = 0.0;
  bool failed = false;
  std::string failure;
};

}  // namespace

CvResult cross_validate_lambda(const FunctionalSample& sample, const RepresenterGram& gram, double tau, double h,
                               const TuningConfig& config, const GdConfig& gd) {
  const Index n = sample.size();
  config.validate(n);
  detail::check_tau(tau);
  detail::check_bandwidth(h);
  const Vector& y = sample.responses();
  const auto labels = stratified_folds(y, config.folds, config.seed);

  std::vector<double> unique = config.lambda_grid;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  const auto folds = static_cast<std::size_t>(config.folds);
  std::vector<std::vector<Index>> train(folds), test(folds);
  for (Index i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < folds; ++f) {
      (labels[static_cast<std::size_t>(i)] == static_cast<int>(f) ? test[f] : train[f]).push_back(i);
    }
  }

  std::vector<FoldOutcome> outcomes(unique.size() * folds);
  parallel_for(outcomes.size(), config.threads, [&](std::size_t job) {
    const std::size_t li = job / folds;
    const std::size_t f = job % folds;
    FoldOutcome& out = outcomes[job];
    try {
      Vector y_train(static_cast<Index>(train[f].size()));
      for (std::size_t k = 0; k < train[f].size(); ++k) y_train[static_cast<Index>(k)] = y[train[f][k]];
      const Index m = gram.n.cols();
      SmoothedObjective obj(representer_design(gram, train[f], train[f]), y_train, tau, h, unique[li],
                            rows_cols(gram.xi, train[f], train[f]), 1 + m);
      const auto fitted = minimize(obj, standard_init(y_train, tau, obj.dim()), gd);
      // An unconverged fit is effectively early-stopped, which regularizes it
      // on its own and biases the comparison toward small lambda.
      if (fitted.trace.status != FitStatus::Converged) {
        out.failed = true;
        out.failure = "FoldFailure(lambda=" + io::format_double(unique[li]) + ", fold=" + std::to_string(f) +
                      "): no convergence in " + std::to_string(fitted.trace.iterations) + " iterations";
        return;
      }
      const Vector pred = representer_design(gram, test[f], train[f]) * fitted.theta;
      double risk = 0.0;
      for (std::size_t k = 0; k < test[f].size(); ++k) {
        risk += smoothed_loss(y[test[f][k]] - pred[static_cast<Index>(k)], tau, h);
      }
      out.risk = risk / static_cast<double>(test[f].size());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivergenceError) throw;
      out.failed = true;
      out.failure = "FoldFailure(lambda=" + io::format_double(unique[li]) + ", fold=" + std::to_string(f) +
                    "): " + e.what();
    }
  });

  std::map<double, CvRow> by_lambda;
  for (std::size_t li = 0; li < unique.size(); ++li) {
    CvRow row;
    row.lambda = unique[li];
    Vector risks(static_cast<Index>(folds));
    for (std::size_t f = 0; f < folds; ++f) {
      const auto& o = outcomes[li * folds + f];
      risks[static_cast<Index>(f)] = o.risk;
      if (o.failed) {
        ++row.failed_folds;
        if (row.failure.empty()) row.failure = o.failure;
      }
    }
    if (row.failed_folds == 0) {
      row.mean_risk = risks.mean();
      row.se_risk = sample_sd(risks) / std::sqrt(static_cast<double>(folds));
    } else {
      row.mean_risk = std::numeric_limits<double>::quiet_NaN();
      row.se_risk = std::numeric_limits<double>::quiet_NaN();
    }
    by_lambda[row.lambda] = row;
  }

  CvResult result;
  for (double l : config.lambda_grid) result.table.push_back(by_lambda.at(l));

  double best_risk = std::numeric_limits<double>::infinity();
  for (const auto& [l, row] : by_lambda) {
    if (row.failed_folds == 0) best_risk = std::min(best_risk, row.mean_risk);
  }
  if (!std::isfinite(best_risk)) fail(ErrorKind::TuningFailure, "every lambda had a failed fold");
  double cutoff = best_risk + 1e-12 * std::abs(best_risk);
  if (config.rule == CvRule::OneSe) {
    double best_se = 0.0;
    for (const auto& [l, row] : by_lambda) {
      if (row.failed_folds == 0 && row.mean_risk <= cutoff) best_se = row.se_risk;
    }
    cutoff += best_se;
  }
  for (const auto& [l, row] : by_lambda) {
    if (row.failed_folds == 0 && row.mean_risk <= cutoff) result.lambda_best = l;  // ascending: last wins
  }
  return result;
}

CvResult cross_validate_lambda(const FunctionalSample& sample, double tau, double h, const TuningConfig& config,
                               const GdConfig& gd) {
  return cross_validate_lambda(sample, build_gram(sample, SobolevKernel(sample.grid())), tau, h, config, gd);
}

std::string to_string(CvRule rule) { return rule == CvRule::Min ? "min" : "one-se"; }

CvRule cv_rule_from_string(const std::string& name) {
  if (name == "min") return CvRule::Min;
  if (name == "one-se") return CvRule::OneSe;
  fail(ErrorKind::InvalidInput, "unknown CV rule '" + name + "' (expected min or one-se)");
}

std::string cv_table_csv(const CvResult& result) {
  std::string out = "lambda,mean_risk,se_risk\n";
  for (const auto& row : result.table) {
    out += io::format_double(row.lambda) + ',' + (row.failed_folds ? "nan" : io::format_double(row.mean_risk)) + ',' +
           (row.failed_folds ? "nan" : io::format_double(row.se_risk)) + '\n';
  }
  return out;
}

}  // namespace flqr
