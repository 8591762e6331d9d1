// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/random.hpp>

namespace qsr {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::OddN: return "OddN";
        case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::InvalidCounters: return "InvalidCounters";
        case ErrorCode::SymmetryViolatedSample: return "SymmetryViolatedSample";
        case ErrorCode::ZeroAmplitudeConfig: return "ZeroAmplitudeConfig";
        case ErrorCode::DegeneratePlane: return "DegeneratePlane";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingOracle: return "MissingOracle";
    }
    return "Unknown";
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                          std::uint64_t lane) noexcept {
    return splitmix64(splitmix64(seed ^ fnv1a64(stream)) + lane);
}

}  // namespace qsr
