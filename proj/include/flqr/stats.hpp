#pragma once

#include "flqr/funcdata.hpp"

namespace flqr {

/// Empirical quantile with linear interpolation between order statistics
/// (the "type 7" definition).
double empirical_quantile(Vector values, double p);

double sample_mean(const Eigen::Ref<const Vector>& values);
/// Standard deviation with the n - 1 divisor.
double sample_sd(const Eigen::Ref<const Vector>& values);
double interquartile_range(const Vector& values);

}  // namespace flqr
