// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/spins.hpp>

#include <numeric>
#include <utility>

namespace qsr {

int count_down(std::span<const std::uint8_t> config) noexcept {
    return std::accumulate(config.begin(), config.end(), 0);
}

bool in_zero_sector(std::span<const std::uint8_t> config) noexcept {
    const auto n = static_cast<int>(config.size());
    return n % 2 == 0 && 2 * count_down(config) == n;
}

std::uint64_t pack(std::span<const std::uint8_t> config) {
    if (config.size() > static_cast<std::size_t>(kMaxPackedSites)) {
        throw Error(ErrorCode::SizeLimitExceeded, "cannot pack more than 64 sites");
    }
    std::uint64_t code = 0;
    for (std::uint8_t s : config) code = (code << 1) | (s & 1u);
    return code;
}

SpinConfiguration unpack(std::uint64_t code, int n) {
    SpinConfiguration config(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        config[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1u);
    }
    return config;
}

std::string to_line(std::span<const std::uint8_t> config) {
    std::string line;
    line.reserve(2 * config.size());
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (i) line.push_back(' ');
        line.push_back(config[i] ? '1' : '0');
    }
    return line;
}

SpinConfiguration exchange(std::span<const std::uint8_t> config, int i) {
    SpinConfiguration out(config.begin(), config.end());
    std::swap(out[static_cast<std::size_t>(i)], out[static_cast<std::size_t>(i) + 1]);
    return out;
}

}  // namespace qsr
