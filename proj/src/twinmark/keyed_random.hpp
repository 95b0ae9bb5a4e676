#pragma once

// Portable keyed randomness. Everything a detector must re-derive (green lists,
// AAR random vectors) comes from splitmix64 so results are bit-exact across
// compilers and platforms. Seeded sampling streams (original sampler, attacks,
// corpus synthesis) use std::mt19937_64, whose output sequence is fixed by the
// standard; conversions to doubles and bounded ints are done here rather than
// through the implementation-defined <random> distributions.

#include "twinmark/common.hpp"

#include <cstdint>
#include <random>

namespace twinmark {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed derived from a key and an ordered window of token ids.
constexpr std::uint64_t hash_window(std::uint64_t key, TokenView window) noexcept
{
    std::uint64_t h = mix64(key);
    for (TokenId id : window) h = mix64(h ^ (static_cast<std::uint64_t>(id) + 1) * kGolden);
    return h;
}

/// Open-interval (0,1) double from 64 random bits; 53-bit resolution.
constexpr double unit_open(std::uint64_t bits) noexcept
{
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Maps 64 random bits onto [0, n) by multiply-shift.
inline std::uint64_t bounded(std::uint64_t bits, std::uint64_t n) noexcept
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

/// Counter-based stream: element i of the stream keyed by `seed`.
constexpr std::uint64_t stream_at(std::uint64_t seed, std::uint64_t i) noexcept
{
    return mix64(seed + (i + 1) * kGolden);
}

/// Seeded sequential stream used wherever draws are consumed in order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return unit_open(engine_()); }
    std::uint64_t below(std::uint64_t n) { return bounded(engine_(), n); }

private:
    std::mt19937_64 engine_;
};

/// Independent per-item seed derived from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t salt = 0) noexcept
{
    return mix64(mix64(master ^ salt) + index);
}

} // namespace twinmark
