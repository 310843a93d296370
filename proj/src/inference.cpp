#include "flqr/inference.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "flqr/error.hpp"
#include "flqr/io.hpp"
#include "flqr/normal.hpp"
#include "flqr/parallel.hpp"
#include "flqr/rng.hpp"
#include "flqr/stats.hpp"

namespace flqr {

namespace {

constexpr Index kChunk = 1000;

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::DomainError, "level must lie in (0,1)");
}

Vector shrink(const EigenSystem& es, double lambda) {
  return (1.0 / (1.0 + lambda * es.rho.array())).matrix();
}

}  // namespace

double z_critical(double level) {
  check_level(level);
  return normal_quantile(0.5 + 0.5 * level);
}

void check_compatible(const FitResult& fit, const EigenSystem& es) {
  if (!(fit.beta_hat.grid == es.grid)) fail(ErrorKind::ConfigMismatch, "eigen-system grid differs from the fit's");
  if (fit.n() != es.n) fail(ErrorKind::ConfigMismatch, "eigen-system sample size differs from the fit's");
  if (std::abs(fit.b_hat - es.b_hat) > 1e-12 * std::max(1.0, std::abs(fit.b_hat))) {
    fail(ErrorKind::ConfigMismatch, "eigen-system was built with a different B_hat (" + io::format_double(es.b_hat) +
                                        " vs " + io::format_double(fit.b_hat) + ")");
  }
}

double variance_sum(const EigenSystem& es, const Vector& phi_t, double lambda) {
  return phi_t.cwiseProduct(shrink(es, lambda)).squaredNorm();
}

PointwiseCi pointwise_ci(const FitResult& fit, const EigenSystem& es, double t0, double level) {
  check_compatible(fit, es);
  const double z = z_critical(level);
  const Vector phi = es.phi_at(t0);
  const double n = static_cast<double>(fit.n());
  const double var = fit.tau * (1.0 - fit.tau) / (n * fit.b_hat) * variance_sum(es, phi, fit.lambda);
  const Vector& pts = fit.beta_hat.grid.points();
  // Center by linear interpolation of beta_hat on the grid.
  const auto it = std::upper_bound(pts.data(), pts.data() + pts.size(), t0);
  Index hi = std::clamp<Index>(it - pts.data(), 1, pts.size() - 1);
  const double w = (t0 - pts[hi - 1]) / (pts[hi] - pts[hi - 1]);
  const double center = (1.0 - w) * fit.beta_hat.values[hi - 1] + w * fit.beta_hat.values[hi];
  return {t0, fit.tau, center, z * std::sqrt(var), level};
}

std::vector<PointwiseCi> pointwise_band(const FitResult& fit, const EigenSystem& es, double level) {
  check_compatible(fit, es);
  const double z = z_critical(level);
  const double scale = fit.tau * (1.0 - fit.tau) / (static_cast<double>(fit.n()) * fit.b_hat);
  const Vector s = shrink(es, fit.lambda);
  std::vector<PointwiseCi> out;
  const Vector& pts = es.grid.points();
  for (Index j = 0; j < pts.size(); ++j) {
    const double var = scale * es.phis.row(j).transpose().cwiseProduct(s).squaredNorm();
    out.push_back({pts[j], fit.tau, fit.beta_hat.values[j], z * std::sqrt(var), level});
  }
  return out;
}

Scb scb(const FitResult& fit, const EigenSystem& es, double level, Index n_paths, std::uint64_t seed, int threads) {
  check_compatible(fit, es);
  check_level(level);
  if (n_paths < kChunk) fail(ErrorKind::InsufficientPaths, "n_paths must be at least 1000");
  // H(t) = sum_nu kappa_nu / (1 + lambda rho_nu) xi_nu phi_nu(t).
  const Vector kappa = (fit.tau * (1.0 - fit.tau) * es.score_moments.array()).sqrt().matrix();
  const Matrix loadings = es.phis * kappa.cwiseProduct(shrink(es, fit.lambda)).asDiagonal();
  const Index k = es.n_eig();
  Vector sups(n_paths);
  const auto chunks = static_cast<std::size_t>((n_paths + kChunk - 1) / kChunk);
  parallel_for(chunks, threads, [&](std::size_t c) {
    CounterRng rng(seed, c);
    const Index start = static_cast<Index>(c) * kChunk;
    const Index count = std::min(kChunk, n_paths - start);
    Matrix xi(k, count);
    for (Index p = 0; p < count; ++p) {
      for (Index v = 0; v < k; ++v) xi(v, p) = rng.normal();
    }
    const Matrix paths = loadings * xi;
    sups.segment(start, count) = paths.cwiseAbs().colwise().maxCoeff().transpose();
  });
  const double q = empirical_quantile(sups, level);
  const double half = q / std::sqrt(static_cast<double>(fit.n()));
  return {level,
          q,
          fit.beta_hat,
          {fit.beta_hat.grid, fit.beta_hat.values.array() - half},
          {fit.beta_hat.grid, fit.beta_hat.values.array() + half},
          n_paths,
          seed};
}

QuantileCi quantile_ci(const FitResult& fit, const EigenSystem& es, const GridFunction& x0, double level) {
  check_compatible(fit, es);
  require_same_grid(x0.grid, es.grid);
  const double z = z_critical(level);
  const Vector x_nu = es.phis.transpose() * es.grid.weights().cwiseProduct(x0.values);
  const double sigma2 = 1.0 / fit.b_hat + x_nu.cwiseProduct(shrink(es, fit.lambda)).squaredNorm();
  const double var = fit.tau * (1.0 - fit.tau) * sigma2 / (static_cast<double>(fit.n()) * fit.b_hat);
  return {x0, fit.tau, predict(fit, x0), z * std::sqrt(var), level, sigma2};
}

InferenceDiagnostics inference_diagnostics(const FitResult& fit, const EigenSystem& es,
                                           const FunctionalSample& sample) {
  check_compatible(fit, es);
  require_same_grid(sample.grid(), es.grid);
  if (sample.size() != es.n) fail(ErrorKind::ConfigMismatch, "sample size differs from the eigen-system's");
  InferenceDiagnostics d;
  // V(beta_hat, phi_nu) = (b/n) sum_i (int X_i beta_hat)(int X_i phi_nu).
  const Vector fitted = sample.curves() * es.grid.weights().cwiseProduct(fit.beta_hat.values);
  const Vector coeffs = es.b_hat / static_cast<double>(es.n) * (es.scores.transpose() * fitted);
  d.bias_proxy = w_lambda_apply(es, coeffs, fit.lambda).norm();

  const Vector s = shrink(es, fit.lambda);
  const Index half = es.n_eig() / 2;
  for (Index j = 0; j < es.phis.rows(); ++j) {
    const Vector terms = es.phis.row(j).transpose().cwiseProduct(s).array().square().matrix();
    const double total = terms.sum();
    if (total > 0.0) d.truncation_share = std::max(d.truncation_share, terms.tail(es.n_eig() - half).sum() / total);
  }
  d.truncation_flag = d.truncation_share > 1e-3;
  return d;
}

std::string ci_csv(const std::vector<PointwiseCi>& cis) {
  std::string out = "t,center,lower,upper\n";
  for (const auto& ci : cis) {
    out += io::format_double(ci.t) + ',' + io::format_double(ci.center) + ',' + io::format_double(ci.lower()) + ',' +
           io::format_double(ci.upper()) + '\n';
  }
  return out;
}

std::string scb_csv(const Scb& band) {
  std::string out = "t,center,lower,upper\n";
  const Vector& pts = band.center.grid.points();
  for (Index j = 0; j < pts.size(); ++j) {
    out += io::format_double(pts[j]) + ',' + io::format_double(band.center.values[j]) + ',' +
           io::format_double(band.lower.values[j]) + ',' + io::format_double(band.upper.values[j]) + '\n';
  }
  return out;
}

std::string quantile_ci_json(const QuantileCi& ci) {
  nlohmann::ordered_json j;
  j["tau"] = ci.tau;
  j["level"] = ci.level;
  j["center"] = ci.center;
  j["half_width"] = ci.half_width;
  j["lower"] = ci.lower();
  j["upper"] = ci.upper();
  j["sigma2"] = ci.sigma2;
  return j.dump(2) + '\n';
}

}  // namespace flqr
