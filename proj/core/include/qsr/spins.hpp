// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qsr {

/// Occupation vector sigma_i in {0, 1}; 0 is spin up, 1 is spin down.
using SpinConfiguration = std::vector<std::uint8_t>;

/// Longest chain that fits a packed configuration code.
inline constexpr int kMaxPackedSites = 64;

/// Number of down spins (entries equal to 1).
int count_down(std::span<const std::uint8_t> config) noexcept;

/// True iff the configuration has exactly N/2 down spins (N even).
bool in_zero_sector(std::span<const std::uint8_t> config) noexcept;

/// Packs a configuration into an integer with sigma_1 as the most
/// significant of the N used bits. Lexicographic order on configurations
/// equals numeric order on codes. N <= 64.
std::uint64_t pack(std::span<const std::uint8_t> config);

SpinConfiguration unpack(std::uint64_t code, int n);

/// "0 1 1 0" style rendering, the dataset line format.
std::string to_line(std::span<const std::uint8_t> config);

/// Swaps sites i and i+1.
SpinConfiguration exchange(std::span<const std::uint8_t> config, int i);

}  // namespace qsr
