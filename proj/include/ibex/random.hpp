#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ibex {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for (master, stream) pairs.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Draws built directly on mt19937_64 bits so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double exponential() { return -std::log1p(-uniform()); }
  double normal() {
    // Box-Muller; one of the pair is discarded.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  // Index drawn from a discrete distribution given by its masses.
  template <class Range>
  std::size_t categorical(const Range& mass) {
    double u = uniform(), acc = 0.0;
    std::size_t last = 0, k = 0;
    for (double p : mass) {
      if (p > 0.0) last = k;
      acc += p;
      if (u < acc) return k;
      ++k;
    }
    return last;
  }
  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ibex
