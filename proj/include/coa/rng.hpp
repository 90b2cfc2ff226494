#pragma once

/// @file rng.hpp
/// Seedable random source shared by every stochastic step of a run.
///
/// The standard distributions are implementation-defined, so traces built on
/// them would differ between standard libraries. The helpers here map raw
/// 64-bit engine output to reals and integers with fixed arithmetic, which
/// keeps a seeded run bit-identical on any conforming platform.

#include <cstdint>
#include <random>

#include "errors.hpp"

namespace coa {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform real in [lo, hi]; returns lo when lo == hi.
inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in the closed range [lo, hi], unbiased (rejection sampling).
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InvalidInput("uniform_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (span == 0) return static_cast<std::int64_t>(rng()); // full 64-bit range
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % span);
}

} // namespace coa
