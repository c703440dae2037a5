#pragma once

#include <cstdint>

#include "ibex/prob.hpp"

namespace ibex {

// Uniform p(x) with Y = X.
JointDistribution gen_identity(std::size_t n);
// Uniform p(x) with Y = f(X) for a seeded balanced surjection f: [n] -> [m].
JointDistribution gen_map(std::size_t n, std::size_t m, std::uint64_t seed);
// gen_map with `noise` of each row's mass spread uniformly off the graph of f.
JointDistribution gen_stochastic(std::size_t n, std::size_t m, double noise, std::uint64_t seed);

}  // namespace ibex
