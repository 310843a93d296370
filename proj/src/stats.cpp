#include "flqr/stats.hpp"

#include <algorithm>
#include <cmath>

#include "flqr/error.hpp"

namespace flqr {

double empirical_quantile(Vector values, double p) {
  if (values.size() == 0) fail(ErrorKind::InvalidInput, "quantile of an empty vector");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::DomainError, "quantile level must lie in [0,1]");
  std::sort(values.data(), values.data() + values.size());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<Index>(std::floor(pos));
  const Index hi = std::min<Index>(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double sample_mean(const Eigen::Ref<const Vector>& values) {
  if (values.size() == 0) fail(ErrorKind::InvalidInput, "mean of an empty vector");
  return values.mean();
}

double sample_sd(const Eigen::Ref<const Vector>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = values.mean();
  return std::sqrt((values.array() - mean).square().sum() / static_cast<double>(values.size() - 1));
}

double interquartile_range(const Vector& values) {
  return empirical_quantile(values, 0.75) - empirical_quantile(values, 0.25);
}

}  // namespace flqr
