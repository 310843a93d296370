#pragma once

#include <cstdint>

namespace flqr {

/// Counter-based generator: draw k of stream s under seed is
/// splitmix64(key(seed, s) + k * golden). Results do not depend on the
/// platform's <random> implementation and any stream can be positioned
/// directly, so parallel chunks reproduce serial output.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0,1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via inverse CDF.
  double normal();
  /// Student t with 3 degrees of freedom via inverse CDF.
  double student_t3();

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Inverse CDF of Student's t with 3 degrees of freedom.
double student_t3_quantile(double p);
double student_t3_cdf(double t);

}  // namespace flqr
