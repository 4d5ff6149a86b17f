#ifndef GROUPDIFF_RNG_HPP
#define GROUPDIFF_RNG_HPP

#include <cstdint>
#include <vector>

namespace groupdiff {

// Deterministic Gaussian stream. The exact construction is part of the
// external reproducibility contract:
//
//   mix(z)            = SplitMix64 finalizer
//   uniform(seed, i)  = ((mix(seed + (i+1)*0x9E3779B97F4A7C15) >> 11) + 1) * 2^-53
//   normal(seed, j)   : m = j/2, r = sqrt(-2 ln uniform(seed, 2m)),
//                       t = 2 pi uniform(seed, 2m+1),
//                       j even -> r cos t, j odd -> r sin t
//
// uniform() lies in (0, 1], so the log is always finite. Stream position is
// a pure function of (seed, index); no generator state is carried between
// calls, which makes sharded evaluation order-independent.

std::uint64_t splitmix64_mix(std::uint64_t z);

double uniform_at(std::uint64_t seed, std::uint64_t index);

double normal_at(std::uint64_t seed, std::uint64_t index);

// Seed for shard s of a partitioned run. Workers drawing from
// shard_seed(seed, s) produce the same values regardless of scheduling.
std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard);

// normal_at(seed, 0..count-1) scaled by sigma, in one pass.
std::vector<double> gaussian_vector(std::uint64_t seed, std::size_t count, double sigma);

}  // namespace groupdiff

#endif
