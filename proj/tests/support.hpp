#pragma once

// Random instances for property tests.

#include <cstdint>
#include <vector>

#include "ibex/matrix.hpp"
#include "ibex/prob.hpp"
#include "ibex/random.hpp"

namespace ibex::testing {

inline constexpr int kPropertyCases = 200;

inline std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) sum += (x = rng.exponential());
  for (auto& x : v) x /= sum;
  return v;
}

// Occasionally zeroes entries so that sparse supports are exercised too.
inline Matrix random_stochastic(Rng& rng, std::size_t rows, std::size_t cols, double zero_prob = 0.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      double v = rng.uniform() < zero_prob ? 0.0 : rng.exponential();
      m(i, j) = v;
      sum += v;
    }
    if (sum == 0.0) {
      m(i, rng.bits() % cols) = 1.0;
      sum = 1.0;
    }
    for (std::size_t j = 0; j < cols; ++j) m(i, j) /= sum;
  }
  return m;
}

inline JointDistribution random_joint(Rng& rng, std::size_t nx, std::size_t ny, double zero_prob = 0.0) {
  const auto px = random_simplex(rng, nx);
  Matrix m = random_stochastic(rng, nx, ny, zero_prob);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) m(i, j) *= px[i];
  return validate_joint(m);
}

inline Encoder random_encoder(Rng& rng, std::size_t nx, std::size_t nt, double zero_prob = 0.0) {
  return Encoder::normalize_rows(random_stochastic(rng, nx, nt, zero_prob));
}

inline JointDistribution identity_joint(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0 / static_cast<double>(n);
  return validate_joint(m);
}

}  // namespace ibex::testing
