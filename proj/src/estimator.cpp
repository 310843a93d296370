#include "flqr/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "flqr/error.hpp"
#include "flqr/io.hpp"
#include "flqr/parallel.hpp"
#include "flqr/smoothing.hpp"
#include "flqr/stats.hpp"

namespace flqr {

Vector assemble_beta(const Theta& theta, const SobolevKernel& kern, const RepresenterGram& gram) {
  return kern.null_basis() * theta.d + gram.xi_curves.transpose() * theta.c;
}

FitResult fit(const FunctionalSample& sample, const SobolevKernel& kern, const RepresenterGram& gram, double tau,
              const FitOptions& options) {
  detail::check_tau(tau);
  require_same_grid(sample.grid(), kern.grid());
  const double h = options.h ? *options.h : rot_bandwidth(sample, gram, tau);
  detail::check_bandwidth(h);

  std::vector<CvRow> table;
  double lambda = 0.0;
  if (options.lambda) {
    lambda = *options.lambda;
    if (!(lambda > 0.0)) fail(ErrorKind::DomainError, "lambda must be positive");
  } else {
    auto cv = cross_validate_lambda(sample, gram, tau, h, options.tuning, options.gd);
    lambda = cv.lambda_best;
    table = std::move(cv.table);
  }

  // Optimize on responses centered at their tau-quantile so that a shift of Y
  // moves only the intercept, independent of the iteration path.
  const double shift = empirical_quantile(sample.responses(), tau);
  const Vector centered = sample.responses().array() - shift;
  const auto obj = representer_objective(gram, centered, tau, h, lambda);
  auto solved = minimize(obj, standard_init(centered, tau, obj.dim()), options.gd);
  Theta theta = Theta::unpack(solved.theta, kern.null_basis().cols());
  theta.alpha += shift;

  GridFunction beta(sample.grid(), assemble_beta(theta, kern, gram));
  const Vector fitted_slope = sample.curves() * sample.grid().weights().cwiseProduct(beta.values);
  Vector residuals = sample.responses() - fitted_slope - Vector::Constant(sample.size(), theta.alpha);
  const double b_hat = estimate_sparsity(residuals, tau);
  const double alpha = theta.alpha;
  return FitResult{tau,   std::move(theta),     lambda, h, std::move(beta), alpha, std::move(residuals), b_hat,
                   std::move(solved.trace), std::move(table)};
}

FitResult fit(const FunctionalSample& sample, double tau, const FitOptions& options) {
  const SobolevKernel kern(sample.grid());
  return fit(sample, kern, build_gram(sample, kern), tau, options);
}

double predict(const FitResult& fit, const GridFunction& x) { return fit.alpha_hat + inner_l2(x, fit.beta_hat); }

double estimate_sparsity(const Vector& residuals, double tau) {
  constexpr double floor = 1e-6;
  const Index n = residuals.size();
  if (n < 2) fail(ErrorKind::InvalidInput, "sparsity estimate needs residuals");
  const double spread = std::min(sample_sd(residuals), interquartile_range(residuals) / 1.34);
  const double bw = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  if (!(bw > 0.0)) return floor;
  const double at = empirical_quantile(residuals, tau);
  double density = 0.0;
  for (Index i = 0; i < n; ++i) density += kdensity((at - residuals[i]) / bw);
  density /= static_cast<double>(n) * bw;
  return std::max(density, floor);
}

void validate_tau_grid(const std::vector<double>& taus) {
  if (taus.empty()) fail(ErrorKind::InvalidTauGrid, "tau grid is empty");
  for (std::size_t j = 0; j < taus.size(); ++j) {
    if (!(taus[j] > 0.0 && taus[j] < 1.0)) fail(ErrorKind::InvalidTauGrid, "tau levels must lie in (0,1)");
    if (j > 0 && !(taus[j] > taus[j - 1])) {
      fail(ErrorKind::InvalidTauGrid, "tau levels must be strictly increasing without duplicates");
    }
  }
}

QuantileCurveFamily fit_family(const FunctionalSample& sample, const std::vector<double>& taus,
                               const FamilyOptions& options) {
  validate_tau_grid(taus);
  const SobolevKernel kern(sample.grid());
  const RepresenterGram gram = build_gram(sample, kern);

  FitOptions base = options.fit;
  if (options.shared_h && !base.h) base.h = rot_bandwidth(sample, gram, 0.5);
  if (options.shared_lambda && !base.lambda) {
    const double h_mid = base.h ? *base.h : rot_bandwidth(sample, gram, 0.5);
    base.lambda = cross_validate_lambda(sample, gram, 0.5, h_mid, base.tuning, base.gd).lambda_best;
  }

  QuantileCurveFamily family;
  family.taus = taus;
  family.fits.resize(taus.size());
  std::vector<std::string> errors(taus.size());
  std::vector<ErrorKind> kinds(taus.size(), ErrorKind::TuningFailure);
  parallel_for(taus.size(), options.threads, [&](std::size_t j) {
    try {
      family.fits[j] = fit(sample, kern, gram, taus[j], base);
    } catch (const Error& e) {
      errors[j] = e.what();
      kinds[j] = e.kind();
    }
  });
  for (std::size_t j = 0; j < taus.size(); ++j) {
    if (!errors[j].empty()) family.failures.push_back("tau=" + io::format_double(taus[j]) + ": " + errors[j]);
  }
  if (family.failures.size() == taus.size()) {
    fail(kinds.front(), "every quantile level failed; first: " + family.failures.front());
  }
  return family;
}

}  // namespace flqr
