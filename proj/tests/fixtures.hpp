// Randomized but well-conditioned systems shared between the module tests and
// the acceptance checks.

#ifndef SYMRED_TESTS_FIXTURES_HPP
#define SYMRED_TESTS_FIXTURES_HPP

#include <cmath>
#include <functional>
#include <random>

#include "symred/mechanical.hpp"

namespace fixtures {

using symred::Mat;
using symred::Vec;

// Smooth x-dependent symmetric positive definite block: a random constant SPD
// core plus a small oscillatory symmetric perturbation. The core dominates the
// perturbation, so positivity holds everywhere.
inline std::function<Mat(const Vec&)> random_spd_block(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Mat a(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = unit(rng);
      b(i, j) = unit(rng);
    }
  const Mat core = a.transpose() * a + 2.0 * Mat::Identity(n, n);
  const Mat wobble = 0.2 * (b + b.transpose());
  Vec dir(3);
  for (int i = 0; i < 3; ++i) dir[i] = unit(rng);
  const double phase = unit(rng);
  return [core, wobble, dir, phase](const Vec& x) {
    return Mat(core + std::sin(dir.dot(x) + phase) * wobble);
  };
}

// Smooth connection coefficients with bounded entries and bounded slopes.
inline std::function<Mat(const Vec&)> random_gamma(std::mt19937_64& rng, int m, int r) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Mat c0(m, r), c1(m, r);
  Vec dir(m);
  for (int i = 0; i < m; ++i) {
    dir[i] = unit(rng);
    for (int a = 0; a < r; ++a) {
      c0(i, a) = 0.5 * unit(rng);
      c1(i, a) = 0.5 * unit(rng);
    }
  }
  const double phase = unit(rng);
  return [c0, c1, dir, phase](const Vec& x) {
    return Mat(c0 + std::cos(dir.dot(x) + phase) * c1);
  };
}

// A fully randomized invariant metric on a 3-dimensional base with structure
// group SO(3); derivatives are left to finite differences on purpose, so the
// metric path with and without analytic input stays exercised.
inline symred::InvariantMetric random_invariant_metric(std::mt19937_64& rng) {
  symred::InvariantMetric metric;
  metric.conn.group = symred::so3_spec();
  metric.conn.base_dim = 3;
  metric.conn.gamma = random_gamma(rng, 3, 3);
  metric.conn.chart = symred::ChartBox::cube(3, 5.0);
  metric.k_base = random_spd_block(rng, 3);
  metric.k_vert = random_spd_block(rng, 3);
  return metric;
}

}  // namespace fixtures

#endif
