// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file checkpoint.hpp
 * @brief JSON checkpoints for both model families.
 *
 * RNN: {format_version, cell_kind, n, d_h, symmetry_mode, epoch, seed,
 *       params: {name: row-major array}}
 * RBM: {format_version, n, n_h, seed, epoch, params: {W, b, c}}
 *
 * The reader tells the two apart by the presence of `cell_kind`.
 */

#pragma once

#include <qsr/rbm.hpp>
#include <qsr/rnn.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

namespace qsr {

inline constexpr int kCheckpointFormatVersion = 1;

struct RnnCheckpoint {
    RnnParameters params;
    SymmetryMode mode = SymmetryMode::None;
    int n = 0;
    int epoch = 0;
    std::uint64_t seed = 0;
};

struct RbmCheckpoint {
    RbmParameters params;
    int n = 0;
    int epoch = 0;
    std::uint64_t seed = 0;
};

using Checkpoint = std::variant<RnnCheckpoint, RbmCheckpoint>;

std::string checkpoint_to_json(const RnnCheckpoint& checkpoint);
std::string checkpoint_to_json(const RbmCheckpoint& checkpoint);

/// Throws ParseError on malformed input and DimensionMismatch on shape errors.
Checkpoint checkpoint_from_json(const std::string& text);

void write_checkpoint(const std::filesystem::path& path, const RnnCheckpoint& checkpoint);
void write_checkpoint(const std::filesystem::path& path, const RbmCheckpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// "ckpt_<epoch>.json".
std::string checkpoint_filename(int epoch);

}  // namespace qsr
