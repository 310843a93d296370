#include "flqr/monotonize.hpp"

#include <algorithm>
#include <cmath>

#include "flqr/error.hpp"
#include "flqr/io.hpp"

namespace flqr {

void QuantilePath::validate() const {
  if (taus.size() != values.size()) fail(ErrorKind::InvalidInput, "quantile path: taus and values differ in length");
  if (taus.size() == 0) fail(ErrorKind::InvalidInput, "quantile path is empty");
  if (!taus.allFinite() || !values.allFinite()) fail(ErrorKind::InvalidInput, "quantile path has non-finite entries");
  for (Index j = 1; j < taus.size(); ++j) {
    if (!(taus[j] > taus[j - 1])) fail(ErrorKind::InvalidInput, "quantile path taus must increase strictly");
  }
}

QuantilePath quantile_path(const QuantileCurveFamily& family, const GridFunction& x0) {
  std::vector<double> taus, values;
  for (std::size_t j = 0; j < family.taus.size(); ++j) {
    if (!family.fits[j]) continue;
    taus.push_back(family.taus[j]);
    values.push_back(predict(*family.fits[j], x0));
  }
  QuantilePath path{Eigen::Map<const Vector>(taus.data(), static_cast<Index>(taus.size())),
                    Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()))};
  path.validate();
  return path;
}

QuantilePath rearrange(const QuantilePath& path) {
  path.validate();
  QuantilePath out = path;
  std::sort(out.values.begin(), out.values.end());
  return out;
}

QuantilePath pava(const QuantilePath& path) {
  path.validate();
  // Blocks of pooled means; each new value merges backwards while it breaks order.
  std::vector<double> sums;
  std::vector<Index> sizes;
  for (Index j = 0; j < path.values.size(); ++j) {
    sums.push_back(path.values[j]);
    sizes.push_back(1);
    while (sums.size() > 1) {
      const std::size_t k = sums.size() - 1;
      if (sums[k - 1] / static_cast<double>(sizes[k - 1]) <= sums[k] / static_cast<double>(sizes[k])) break;
      sums[k - 1] += sums[k];
      sizes[k - 1] += sizes[k];
      sums.pop_back();
      sizes.pop_back();
    }
  }
  QuantilePath out = path;
  Index pos = 0;
  for (std::size_t b = 0; b < sums.size(); ++b) {
    const double mean = sums[b] / static_cast<double>(sizes[b]);
    out.values.segment(pos, sizes[b]).setConstant(mean);
    pos += sizes[b];
  }
  return out;
}

QuantilePath combine(const QuantilePath& path, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) fail(ErrorKind::DomainError, "combination weight must lie in [0,1]");
  QuantilePath out = rearrange(path);
  out.values = weight * out.values + (1.0 - weight) * pava(path).values;
  return out;
}

double lq_distance(const Vector& a, const Vector& b, double q) {
  if (a.size() != b.size()) fail(ErrorKind::DimensionMismatch, "lq_distance: lengths differ");
  if (!(q >= 1.0)) fail(ErrorKind::DomainError, "lq_distance: q must be at least 1");
  return std::pow((a - b).cwiseAbs().array().pow(q).sum(), 1.0 / q);
}

Vector default_monotone_grid() { return Vector::LinSpaced(21, 0.1, 0.9); }

std::string monotone_csv(const QuantilePath& path, double weight) {
  const QuantilePath r = rearrange(path);
  const QuantilePath p = pava(path);
  const QuantilePath c = combine(path, weight);
  std::string out = "tau,raw,rearranged,isotonic,combined\n";
  for (Index j = 0; j < path.taus.size(); ++j) {
    out += io::format_double(path.taus[j]) + ',' + io::format_double(path.values[j]) + ',' +
           io::format_double(r.values[j]) + ',' + io::format_double(p.values[j]) + ',' +
           io::format_double(c.values[j]) + '\n';
  }
  return out;
}

}  // namespace flqr
