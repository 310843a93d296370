#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>

#include <unistd.h>

#include <doctest.h>

#include "flqr/error.hpp"
#include "flqr/funcdata.hpp"
#include "flqr/rng.hpp"
#include "flqr/simharness.hpp"

namespace flqr::test {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an flqr::Error");
  return ErrorKind::InvalidInput;
}

inline SimSample sim(Index n, std::uint64_t seed, ErrorFamily family = ErrorFamily::Normal, double snr = 10.0) {
  SimDesign d;
  d.n = n;
  d.seed = seed;
  d.error_family = family;
  d.snr = snr;
  return generate(d);
}

// Random curves on a uniform grid with standard normal responses.
inline FunctionalSample random_sample(Index n, Index p, std::uint64_t seed) {
  CounterRng rng(seed);
  const Grid grid = Grid::uniform(p);
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal();
    for (Index j = 0; j < p; ++j) {
      const double t = grid[j];
      x(i, j) = a + b * std::cos(3.0 * t) + c * t * t + 0.1 * rng.normal();
    }
  }
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = rng.normal();
  return {grid, std::move(x), std::move(y)};
}

// Gauss-Legendre rule with 5 nodes on [a, b]; exact for degree 9.
inline double gauss5(const std::function<double(double)>& f, double a, double b) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                              0.2369268850561891};
  const double m = 0.5 * (a + b), r = 0.5 * (b - a);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += w[k] * f(m + r * x[k]);
  return s * r;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("flqr_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace flqr::test
