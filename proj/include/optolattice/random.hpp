#pragma once

// Seed derivation shared by every stochastic routine.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace optolattice {

/// splitmix64 finalizer.
[[nodiscard]] inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive hash of a seed tuple, e.g. (master, sigma_idx, sample_idx).
[[nodiscard]] inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto p : parts) h = mix64(h ^ mix64(p));
    return h;
}

using Rng = std::mt19937_64;

}  // namespace optolattice
