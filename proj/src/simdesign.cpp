#include <cmath>
#include <numbers>

#include "flqr/error.hpp"
#include "flqr/normal.hpp"
#include "flqr/rng.hpp"
#include "flqr/simharness.hpp"

namespace flqr {

std::string to_string(ErrorFamily family) { return family == ErrorFamily::Normal ? "normal" : "t3"; }

ErrorFamily error_family_from_string(const std::string& name) {
  if (name == "normal") return ErrorFamily::Normal;
  if (name == "t3") return ErrorFamily::StudentT3;
  fail(ErrorKind::InvalidInput, "unknown error family '" + name + "' (expected normal or t3)");
}

void SimDesign::validate() const {
  if (n < 10) fail(ErrorKind::InvalidInput, "design needs n >= 10");
  if (!(snr > 0.0)) fail(ErrorKind::InvalidInput, "snr must be positive");
  if (n_terms < 1) fail(ErrorKind::InvalidInput, "n_terms must be positive");
  if (grid_size < 4) fail(ErrorKind::InvalidInput, "grid_size must be at least 4");
}

double SimDesign::zeta(int k) { return 4.0 * ((k % 2 == 1) ? 1.0 : -1.0) / (static_cast<double>(k) * k); }

double SimDesign::psi(int k, double t) {
  if (k == 1) return 1.0;
  return std::numbers::sqrt2 * std::cos(static_cast<double>(k - 1) * std::numbers::pi * t);
}

double SimDesign::beta_coefficient(int k) {
  const double e1 = std::exp(-1.0);
  if (k == 1) return 1.0 - e1;
  const double w = static_cast<double>(k - 1) * std::numbers::pi;
  const double sign = ((k - 1) % 2 == 0) ? 1.0 : -1.0;  // cos(w) at t = 1
  return std::numbers::sqrt2 * (1.0 - sign * e1) / (1.0 + w * w);
}

double SimDesign::signal_variance() const {
  double v = 0.0;
  for (int k = 1; k <= n_terms; ++k) {
    const double b = zeta(k) * beta_coefficient(k);
    v += b * b;
  }
  return v;
}

double SimDesign::error_variance() const { return error_family == ErrorFamily::Normal ? 1.0 : 3.0; }

double SimDesign::sigma() const { return std::sqrt(signal_variance() / (snr * error_variance())); }

double SimDesign::error_quantile(double tau) const {
  const double q = error_family == ErrorFamily::Normal ? normal_quantile(tau) : student_t3_quantile(tau);
  return sigma() * q;
}

GridFunction SimDesign::beta_on(const Grid& grid) const {
  return {grid, grid.points().unaryExpr([](double t) { return beta_true(t); })};
}

namespace {

Matrix basis_on(const Grid& grid, int n_terms) {
  Matrix psi(grid.size(), n_terms);
  for (int k = 1; k <= n_terms; ++k) {
    for (Index j = 0; j < grid.size(); ++j) psi(j, k - 1) = SimDesign::psi(k, grid[j]);
  }
  return psi;
}

Vector weighted_coefficients(int n_terms) {
  Vector w(n_terms);
  for (int k = 1; k <= n_terms; ++k) w[k - 1] = SimDesign::zeta(k) * SimDesign::beta_coefficient(k);
  return w;
}

Matrix draw_scores(CounterRng& rng, Index rows, int n_terms) {
  const double r3 = std::sqrt(3.0);
  Matrix u(rows, n_terms);
  for (Index i = 0; i < rows; ++i) {
    for (int k = 0; k < n_terms; ++k) u(i, k) = rng.uniform(-r3, r3);
  }
  return u;
}

}  // namespace

SimSample generate(const SimDesign& design) {
  design.validate();
  const Grid grid = Grid::uniform(design.grid_size);
  CounterRng rng(design.seed, 1);
  const Matrix u = draw_scores(rng, design.n, design.n_terms);
  Vector zeta(design.n_terms);
  for (int k = 1; k <= design.n_terms; ++k) zeta[k - 1] = SimDesign::zeta(k);
  Matrix curves = (u * zeta.asDiagonal()) * basis_on(grid, design.n_terms).transpose();
  Vector signal = u * weighted_coefficients(design.n_terms);

  const double sigma = design.sigma();
  Vector y(design.n);
  for (Index i = 0; i < design.n; ++i) {
    const double eps = design.error_family == ErrorFamily::Normal ? rng.normal() : rng.student_t3();
    y[i] = design.alpha_true + signal[i] + sigma * eps;
  }
  return {FunctionalSample(grid, std::move(curves), std::move(y)), design.beta_on(grid), design.alpha_true, sigma,
          std::move(signal)};
}

SimCurve generate_curve(const SimDesign& design, std::uint64_t stream) {
  design.validate();
  const Grid grid = Grid::uniform(design.grid_size);
  CounterRng rng(design.seed, 0x5EED0000ULL + stream);
  const Matrix u = draw_scores(rng, 1, design.n_terms);
  Vector zeta(design.n_terms);
  for (int k = 1; k <= design.n_terms; ++k) zeta[k - 1] = SimDesign::zeta(k);
  Vector x = basis_on(grid, design.n_terms) * (zeta.asDiagonal() * u.row(0).transpose());
  const double signal = u.row(0).dot(weighted_coefficients(design.n_terms));
  return {GridFunction(grid, std::move(x)), signal};
}

double true_conditional_quantile(const SimDesign& design, double signal, double tau) {
  return design.alpha_true + signal + design.error_quantile(tau);
}

double mise(const GridFunction& beta_hat, const GridFunction& beta_true) {
  require_same_grid(beta_hat.grid, beta_true.grid);
  return integrate(beta_hat.grid, (beta_hat.values - beta_true.values).array().square().matrix());
}

}  // namespace flqr
