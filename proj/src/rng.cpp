#include "flqr/rng.hpp"

#include <cmath>
#include <numbers>

#include "flqr/error.hpp"
#include "flqr/normal.hpp"

namespace flqr {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed + kGolden) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

std::uint64_t CounterRng::next_u64() { return mix(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() {
  // 53 random bits, shifted by half an ulp so 0 is never produced.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return normal_quantile(uniform()); }

double CounterRng::student_t3() { return student_t3_quantile(uniform()); }

double student_t3_cdf(double t) {
  const double theta = std::atan(t / std::sqrt(3.0));
  return 0.5 + (theta + 0.5 * std::sin(2.0 * theta)) / std::numbers::pi;
}

double student_t3_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::DomainError, "student_t3_quantile needs p in (0,1)");
  // With theta = atan(t / sqrt 3) the CDF is 1/2 + (theta + sin(2 theta)/2) / pi,
  // monotone in theta on (-pi/2, pi/2). Safeguarded Newton in theta.
  const double target = std::numbers::pi * (p - 0.5);
  double lo = -0.5 * std::numbers::pi;
  double hi = 0.5 * std::numbers::pi;
  double theta = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double f = theta + 0.5 * std::sin(2.0 * theta) - target;
    if (f > 0.0) hi = theta; else lo = theta;
    const double df = 1.0 + std::cos(2.0 * theta);
    double next = df > 0.0 ? theta - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - theta) <= 1e-15 * (1.0 + std::abs(theta))) {
      theta = next;
      break;
    }
    theta = next;
  }
  return std::sqrt(3.0) * std::tan(theta);
}

}  // namespace flqr
