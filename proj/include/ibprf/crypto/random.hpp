#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ibprf/crypto/types.hpp"

namespace ibprf {

/// Seeded randomness source. Every stochastic step of a run draws from one of these,
/// so a (config, seed) pair reproduces the run exactly.
using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for trial `index` of a run with master seed `master`.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

/// Uniform integer in [0, bound). Rejection sampling, so the result does not depend
/// on the standard library's distribution implementation.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

/// `count` distinct values from [0, bound), returned in ascending order (Floyd's algorithm).
std::vector<std::uint64_t> sample_without_replacement(Rng& rng, std::uint64_t bound,
                                                      std::uint64_t count);

/// Fresh 16-byte session key drawn from the run's randomness.
PairwiseKey random_key(Rng& rng);
MasterKey random_master_key(Rng& rng);

}  // namespace ibprf
