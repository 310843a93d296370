#pragma once

#include <cmath>
#include <numbers>

namespace flqr {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse standard normal CDF. Rational approximation (Acklam) followed by one
/// Halley refinement against erfc, which brings the error below 1e-12.
double normal_quantile(double p);

}  // namespace flqr
