// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsr {

enum class ErrorCode {
    OddN,
    SizeLimitExceeded,
    DimensionMismatch,
    ConvergenceFailure,
    InvalidCounters,
    SymmetryViolatedSample,
    ZeroAmplitudeConfig,
    DegeneratePlane,
    InvalidArgument,
    ParseError,
    MissingOracle,
};

const char* to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when a U(1)-mode evaluation meets a configuration outside the
/// zero-magnetization sector. `index()` is the position in the batch.
class SymmetryViolation : public Error {
public:
    SymmetryViolation(std::size_t index, const std::string& what)
        : Error(ErrorCode::SymmetryViolatedSample, what), index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace qsr
