#include "flqr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "flqr/error.hpp"
#include "flqr/smoothing.hpp"

namespace flqr {

Vector Theta::packed() const {
  Vector v(1 + d.size() + c.size());
  v[0] = alpha;
  v.segment(1, d.size()) = d;
  v.tail(c.size()) = c;
  return v;
}

Theta Theta::unpack(const Eigen::Ref<const Vector>& v, Index m) {
  if (v.size() < 1 + m) fail(ErrorKind::DimensionMismatch, "packed theta too short");
  return {v[0], v.segment(1, m), v.tail(v.size() - 1 - m)};
}

void GdConfig::validate() const {
  if (!(tol > 0.0)) fail(ErrorKind::InvalidInput, "tol must be positive");
  if (max_iter < 1) fail(ErrorKind::InvalidInput, "max_iter must be at least 1");
  if (!(gamma_cap > 0.0) || !(gamma0 > 0.0)) fail(ErrorKind::InvalidInput, "step sizes must be positive");
}

SmoothedObjective::SmoothedObjective(Matrix design, Vector response, double tau, double h, double lambda,
                                     Matrix penalty, Index penalty_offset)
    : design_(std::move(design)),
      response_(std::move(response)),
      tau_(tau),
      h_(h),
      lambda_(lambda),
      penalty_(std::move(penalty)),
      penalty_offset_(penalty_offset) {
  detail::check_tau(tau_);
  detail::check_bandwidth(h_);
  if (!(lambda_ >= 0.0)) fail(ErrorKind::DomainError, "lambda must be nonnegative");
  if (design_.rows() != response_.size()) fail(ErrorKind::DimensionMismatch, "design rows do not match responses");
  if (penalty_.size() > 0) {
    if (penalty_.rows() != penalty_.cols() || penalty_offset_ + penalty_.rows() != design_.cols()) {
      fail(ErrorKind::DimensionMismatch, "penalty block does not match the trailing design columns");
    }
  }
}

double SmoothedObjective::penalty_value(const Eigen::Ref<const Vector>& theta, Vector* pen_grad) const {
  if (penalty_.size() == 0 || lambda_ == 0.0) return 0.0;
  const auto b = theta.tail(penalty_.rows());
  Vector pb = penalty_ * b;
  const double value = 0.5 * lambda_ * b.dot(pb);
  if (pen_grad) pen_grad->tail(penalty_.rows()) += lambda_ * pb;
  return value;
}

Vector SmoothedObjective::residuals(const Eigen::Ref<const Vector>& theta) const {
  if (theta.size() != dim()) fail(ErrorKind::DimensionMismatch, "theta has the wrong length");
  return response_ - design_ * theta;
}

double SmoothedObjective::value(const Eigen::Ref<const Vector>& theta) const {
  const Vector r = residuals(theta);
  double loss = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    const double z = r[i] / h_;
    loss += tau_ * r[i] - r[i] * kbar(-z) + h_ * kdensity(z);
  }
  return loss / static_cast<double>(r.size()) + penalty_value(theta, nullptr);
}

double SmoothedObjective::value_and_gradient(const Eigen::Ref<const Vector>& theta, Vector& grad) const {
  const Vector r = residuals(theta);
  const double inv_n = 1.0 / static_cast<double>(r.size());
  Vector score(r.size());
  double loss = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    const double z = r[i] / h_;
    const double cdf = kbar(-z);
    loss += tau_ * r[i] - r[i] * cdf + h_ * kdensity(z);
    score[i] = cdf - tau_;
  }
  grad.noalias() = inv_n * (design_.transpose() * score);
  return loss * inv_n + penalty_value(theta, &grad);
}

SmoothedObjective representer_objective(const RepresenterGram& gram, const Vector& response, double tau, double h,
                                        double lambda) {
  const Index n = gram.xi.rows();
  const Index m = gram.n.cols();
  if (gram.n.rows() != n || response.size() != n) fail(ErrorKind::DimensionMismatch, "gram and responses disagree");
  Matrix design(n, 1 + m + n);
  design.col(0).setOnes();
  design.middleCols(1, m) = gram.n;
  design.rightCols(n) = gram.s;
  return {std::move(design), response, tau, h, lambda, gram.xi, 1 + m};
}

namespace {

void check_theta(const Theta& theta, const RepresenterGram& gram, const FunctionalSample& sample) {
  if (theta.d.size() != gram.n.cols() || theta.c.size() != gram.xi.rows() || sample.size() != gram.xi.rows()) {
    fail(ErrorKind::DimensionMismatch, "theta, gram and sample dimensions disagree");
  }
}

}  // namespace

double objective(const Theta& theta, const RepresenterGram& gram, const FunctionalSample& sample, double tau, double h,
                 double lambda) {
  check_theta(theta, gram, sample);
  return representer_objective(gram, sample.responses(), tau, h, lambda).value(theta.packed());
}

ThetaGradient gradient(const Theta& theta, const RepresenterGram& gram, const FunctionalSample& sample, double tau,
                       double h, double lambda) {
  check_theta(theta, gram, sample);
  Vector g;
  representer_objective(gram, sample.responses(), tau, h, lambda).value_and_gradient(theta.packed(), g);
  const Index m = theta.d.size();
  return {g[0], g.segment(1, m), g.tail(theta.c.size())};
}

std::optional<BbRates> bb_step(const Eigen::Ref<const Vector>& delta, const Eigen::Ref<const Vector>& g) {
  if (delta.size() != g.size()) fail(ErrorKind::DimensionMismatch, "bb_step vectors differ in length");
  const double dd = delta.squaredNorm();
  const double dg = delta.dot(g);
  const double gg = g.squaredNorm();
  if (dg == 0.0 || gg == 0.0) return std::nullopt;
  BbRates rates{dd / dg, dg / gg};
  if (!std::isfinite(rates.gamma1) || !std::isfinite(rates.gamma2)) return std::nullopt;
  return rates;
}

Vector column_scales(const Matrix& design) {
  Vector scales(design.cols());
  const double inv_n = 1.0 / static_cast<double>(std::max<Index>(design.rows(), 1));
  for (Index j = 0; j < design.cols(); ++j) {
    const double rms = std::sqrt(design.col(j).squaredNorm() * inv_n);
    scales[j] = rms > 0.0 && std::isfinite(rms) ? rms : 1.0;
  }
  return scales;
}

MinimizeResult minimize(const SmoothedObjective& objective, const Vector& init, const GdConfig& config) {
  config.validate();
  if (init.size() != objective.dim()) fail(ErrorKind::DimensionMismatch, "initial value has the wrong length");

  // Iterates live in scaled coordinates u = theta .* s with s the RMS of each
  // design column; the stopping rule uses the gradient in theta.
  const Vector s = config.standardize ? column_scales(objective.design()) : Vector::Ones(objective.dim());

  FitTrace trace;
  Vector theta = init;
  Vector grad;
  double f = objective.value_and_gradient(theta, grad);
  if (!std::isfinite(f)) fail(ErrorKind::DivergenceError, "objective is not finite at the initial value");
  trace.objective_path.push_back(f);

  Vector best = theta;
  double best_f = f;
  double best_gnorm = grad.norm();
  if (best_gnorm <= config.tol) {
    trace.status = FitStatus::Converged;
    trace.final_grad_norm = best_gnorm;
    return {std::move(theta), std::move(trace)};
  }

  Vector u = theta.cwiseProduct(s);
  Vector g = grad.cwiseQuotient(s);
  double gamma = config.gamma0;
  Vector u_new(u.size());
  Vector g_new(u.size());
  for (int r = 1; r <= config.max_iter; ++r) {
    u_new = u - gamma * g;
    theta = u_new.cwiseQuotient(s);
    const double f_new = objective.value_and_gradient(theta, grad);
    trace.iterations = r;
    if (!std::isfinite(f_new)) {
      trace.final_grad_norm = best_gnorm;
      fail(ErrorKind::DivergenceError, "objective became non-finite at iteration " + std::to_string(r) +
                                           " (gamma = " + std::to_string(gamma) + ")");
    }
    trace.objective_path.push_back(f_new);
    const double gnorm = grad.norm();
    if (gnorm <= config.tol) {
      trace.status = FitStatus::Converged;
      trace.final_grad_norm = gnorm;
      return {std::move(theta), std::move(trace)};
    }
    if (f_new < best_f) {
      best_f = f_new;
      best = theta;
      best_gnorm = gnorm;
    }
    g_new = grad.cwiseQuotient(s);

    const auto rates = bb_step(u_new - u, g_new - g);
    if (rates && rates->gamma1 > 0.0 && rates->gamma2 > 0.0) {
      gamma = std::min({rates->gamma1, rates->gamma2, config.gamma_cap});
    } else {
      gamma = 1.0;
      ++trace.safeguard_hits;
    }
    u.swap(u_new);
    g.swap(g_new);
  }

  trace.status = FitStatus::MaxIterReached;
  trace.final_grad_norm = best_gnorm;
  return {std::move(best), std::move(trace)};
}

}  // namespace flqr
