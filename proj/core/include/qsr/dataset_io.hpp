// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <qsr/xy_chain.hpp>

#include <filesystem>
#include <iosfwd>

namespace qsr {

/// Dataset text format: one sample per line, N space-separated 0/1
/// characters, '#' starts a comment line, no header. N is inferred from the
/// first sample; every other sample must match. Blank lines are skipped.
Dataset parse_dataset(std::istream& in);
Dataset read_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset(const std::filesystem::path& path, const Dataset& data);

/// Ground-state cache: {n, j, energy, basis_order: "lex", amplitudes: [...]}.
void write_ground_state(const std::filesystem::path& path, const GroundState& gs);
GroundState read_ground_state(const std::filesystem::path& path);

/// Reads the whole file; ParseError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace qsr
