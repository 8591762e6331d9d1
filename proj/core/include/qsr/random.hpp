// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qsr {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a; used as the stable hash behind stream derivation and
/// file checksums.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the named subsystem stream: splitmix64(seed ^ fnv1a64(name)).
/// `lane` separates independent lanes of one subsystem.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                          std::uint64_t lane = 0) noexcept;

inline Rng make_stream(std::uint64_t seed, std::string_view stream, std::uint64_t lane = 0) {
    return Rng(derive_seed(seed, stream, lane));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Counter-based uniform in [0, 1): a pure function of (key, a, b). Lets
/// per-sample draws stay identical however the work is batched.
inline double counter_uniform(std::uint64_t key, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t x = splitmix64(key ^ splitmix64(a * 0x9E3779B97F4A7C15ULL + b));
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace qsr
