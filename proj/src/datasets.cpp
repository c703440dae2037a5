#include "ibex/datasets.hpp"

#include <numeric>
#include <vector>

#include "ibex/error.hpp"
#include "ibex/random.hpp"

namespace ibex {

namespace {

void check_shape(std::size_t n, std::size_t m) {
  if (m < 1 || n < m) throw Error(ErrorCode::BadShape, "need n >= m >= 1");
}

std::vector<std::size_t> balanced_map(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, 0xda7aULL));
  for (std::size_t i = n; i > 1; --i) {
    const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(perm[i - 1], perm[std::min(k, i - 1)]);
  }
  std::vector<std::size_t> f(n);
  for (std::size_t x = 0; x < n; ++x) f[x] = perm[x] % m;
  return f;
}

}  // namespace

JointDistribution gen_identity(std::size_t n) {
  check_shape(n, n);
  std::vector<std::vector<double>> pxy(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) pxy[x][x] = 1.0 / static_cast<double>(n);
  return validate_joint(pxy);
}

JointDistribution gen_map(std::size_t n, std::size_t m, std::uint64_t seed) {
  return gen_stochastic(n, m, 0.0, seed);
}

JointDistribution gen_stochastic(std::size_t n, std::size_t m, double noise, std::uint64_t seed) {
  check_shape(n, m);
  if (!(noise >= 0.0 && noise < 0.5)) throw Error(ErrorCode::BadShape, "noise must lie in [0, 0.5)");
  if (m == 1) noise = 0.0;
  const auto f = balanced_map(n, m, seed);
  const double px = 1.0 / static_cast<double>(n);
  std::vector<std::vector<double>> pxy(n, std::vector<double>(m, 0.0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y)
      pxy[x][y] = px * (y == f[x] ? 1.0 - noise : noise / static_cast<double>(m - 1));
  return validate_joint(pxy);
}

}  // namespace ibex
