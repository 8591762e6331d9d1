// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

// Entry point of the `qsr` command-line tool, kept in a library so the
// tests can drive it without spawning processes.

#pragma once

#include <qsr/error.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace qsr::cli {

/// Process exit codes. Stable; documented in the README.
enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kValidation = 2,
    kSolver = 3,
    kSymmetryViolation = 4,
    kMissingOracle = 5,
    kDegeneratePlane = 6,
};

/// Exit code reported for a library error.
int exit_code_for(ErrorCode code);

/// Runs one command. `args` excludes the program name, e.g.
/// {"gen-data", "--n", "4", "--out", "d.txt"}.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qsr::cli
