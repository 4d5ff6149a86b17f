#include "groupdiff/rng.hpp"

#include <cmath>

namespace groupdiff {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

double uniform_at(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t word = splitmix64_mix(seed + (index + 1) * kGolden);
    // 53 significant bits mapped to (0, 1]; never 0 so log() stays finite.
    return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

double normal_at(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t pair = index >> 1;
    const double u1 = uniform_at(seed, 2 * pair);
    const double u2 = uniform_at(seed, 2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = kTwoPi * u2;
    return (index & 1) ? r * std::sin(t) : r * std::cos(t);
}

std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard) {
    return splitmix64_mix(seed ^ ((shard + 1) * kGolden));
}

std::vector<double> gaussian_vector(std::uint64_t seed, std::size_t count, double sigma) {
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        out[j] = sigma * normal_at(seed, j);
    }
    return out;
}

}  // namespace groupdiff
