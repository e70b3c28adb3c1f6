#pragma once
// Deterministic seeding helpers. Substream seeds are derived with splitmix64
// so batched operations can hand independent, scheduling-invariant streams to
// each work item (sample, image, grid point).

#include <cstdint>
#include <random>

namespace qsec {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seed for work item `index` within the stream identified by `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace qsec
