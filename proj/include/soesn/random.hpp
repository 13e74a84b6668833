#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace soesn {

using Seed = std::uint64_t;
using Engine = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and a sequence of indices.
/// Used for every per-trial / per-attempt / per-stream seed in the library.
constexpr Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> path) noexcept
{
    Seed s = mix64(base);
    for (auto p : path) {
        s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
    return s;
}

// Stream indices under a trial seed.
inline constexpr std::uint64_t kWeightStream = 0;
inline constexpr std::uint64_t kStateStream = 1;
inline constexpr std::uint64_t kSecondStateStream = 2;
inline constexpr std::uint64_t kLeakStream = 3;

inline Engine make_engine(Seed seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Engine(seq);
}

/// Uniform draw on [lo, hi].
inline double uniform(Engine& engine, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(engine);
}

} // namespace soesn
