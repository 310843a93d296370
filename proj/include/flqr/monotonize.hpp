#pragma once

#include <string>
#include <vector>

#include "flqr/estimator.hpp"

namespace flqr {

/// Conditional-quantile estimates on an increasing tau grid.
struct QuantilePath {
  Vector taus;
  Vector values;

  /// Throws InvalidInput unless the lengths agree, taus increase strictly and
  /// every entry is finite.
  void validate() const;
};

/// Predicted conditional quantiles at x0 for every level that was fitted.
QuantilePath quantile_path(const QuantileCurveFamily& family, const GridFunction& x0);

/// Sorts the values: the discrete inverse of the induced distribution function.
QuantilePath rearrange(const QuantilePath& path);

/// L2 isotonic regression with unit weights (pool adjacent violators).
QuantilePath pava(const QuantilePath& path);

/// weight * rearrange + (1 - weight) * pava. DomainError unless weight in [0,1].
QuantilePath combine(const QuantilePath& path, double weight = 0.5);

/// Discrete L_q distance between two value vectors, (sum |a - b|^q)^(1/q).
double lq_distance(const Vector& a, const Vector& b, double q);

/// Default monotonization grid: 21 equispaced levels on [0.1, 0.9].
Vector default_monotone_grid();

/// CSV with columns tau, raw, rearranged, isotonic, combined.
std::string monotone_csv(const QuantilePath& path, double weight = 0.5);

}  // namespace flqr
