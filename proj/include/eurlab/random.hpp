#pragma once

#include <cstdint>
#include <random>

namespace eurlab {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent per-worker seeds from a
// base seed and an index so that parallel loops stay order independent.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix_seed(seed + index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng{mix_seed(seed)}; }

}  // namespace eurlab
