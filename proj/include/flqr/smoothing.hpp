#pragma once

#include <cmath>
#include <numbers>

#include "flqr/error.hpp"

namespace flqr {

/// Smoothing kernel for the convolution-smoothed check loss. Only the Gaussian
/// family is provided; it is second-order (int u k(u) du = 0) and gives closed
/// forms for the loss and its derivatives.
struct SmoothKernel {
  enum class Family { Gaussian };

  explicit SmoothKernel(double h, Family f = Family::Gaussian) : family(f), bandwidth(h) {
    if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::DomainError, "bandwidth must be positive");
  }

  Family family;
  double bandwidth;
};

namespace detail {

inline void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) fail(ErrorKind::DomainError, "tau must lie in (0,1)");
}

inline void check_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::DomainError, "bandwidth must be positive");
}

}  // namespace detail

/// rho_tau(u) = u (tau - 1{u < 0}).
template <typename Scalar>
Scalar check_loss(Scalar u, double tau) {
  detail::check_tau(tau);
  return u * (tau - (u < Scalar(0) ? 1.0 : 0.0));
}

/// CDF of the Gaussian smoothing kernel.
template <typename Scalar>
Scalar kbar(Scalar v) {
  using std::erfc;
  return Scalar(0.5) * erfc(-v / std::numbers::sqrt2_v<Scalar>);
}

/// Density of the Gaussian smoothing kernel.
template <typename Scalar>
Scalar kdensity(Scalar v) {
  using std::exp;
  return exp(Scalar(-0.5) * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

/// l_h(u; tau) = int rho_tau(v) k_h(v - u) dv
///             = tau u - u Kbar(-u/h) + h k(u/h)    (Gaussian k).
template <typename Scalar>
Scalar smoothed_loss(Scalar u, double tau, double h) {
  detail::check_tau(tau);
  detail::check_bandwidth(h);
  const Scalar z = u / h;
  return tau * u - u * kbar(-z) + h * kdensity(z);
}

/// Kbar(-u/h) - tau. This is the derivative of l_h(y - q; tau) with respect to
/// the fitted location q at residual u = y - q, i.e. minus d l_h / du; it is the
/// per-observation factor in every gradient of the smoothed objective.
template <typename Scalar>
Scalar smoothed_loss_derivative(Scalar u, double tau, double h) {
  detail::check_tau(tau);
  detail::check_bandwidth(h);
  return kbar(-u / h) - tau;
}

/// Second derivative of l_h in u, equal to the scaled kernel k_h(u).
template <typename Scalar>
Scalar smoothed_loss_curvature(Scalar u, double h) {
  detail::check_bandwidth(h);
  return kdensity(u / h) / h;
}

}  // namespace flqr
