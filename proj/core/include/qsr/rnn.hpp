// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file rnn.hpp
 * @brief Autoregressive recurrent wavefunction psi(sigma) = sqrt(p(sigma)).
 *
 * A single recurrent cell (vanilla tanh or GRU) reads the one-hot previous
 * spin and the previous hidden vector; a softmax layer turns each hidden
 * vector into the conditional (p(sigma_i = 0 | sigma_<i), p(sigma_i = 1 | ...)).
 * The chain starts from h_0 = 0 and sigma_0 = (1, 0).
 *
 * In U(1) mode each conditional is projected so that neither spin value can
 * exceed N/2 occurrences; the resulting distribution lives entirely in the
 * zero-magnetization sector.
 */

#pragma once

#include <qsr/parameters.hpp>
#include <qsr/random.hpp>
#include <qsr/spins.hpp>

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsr {

enum class CellKind { Vanilla, Gru };
enum class SymmetryMode { None, U1 };

std::string_view to_string(CellKind kind) noexcept;
std::string_view to_string(SymmetryMode mode) noexcept;
/// Accepts "vanilla" / "gru"; throws InvalidArgument otherwise.
CellKind parse_cell_kind(std::string_view text);
/// Accepts "none" / "u1"; throws InvalidArgument otherwise.
SymmetryMode parse_symmetry_mode(std::string_view text);

using HiddenState = Eigen::VectorXd;
/// (p(sigma_i = 0 | ...), p(sigma_i = 1 | ...)).
using ConditionalDistribution = std::array<double, 2>;

/// log p for configurations the model cannot produce.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// Cell weights plus the softmax layer.
///
/// Tensor order (also the checkpoint names):
///   vanilla: W (d_h x 2), U (d_h x d_h), b (d_h), V (2 x d_h), c (2)
///   gru:     W_z, W_r, W_h (d_h x 2), U_z, U_r, U_h (d_h x d_h),
///            b_z, b_r, b_h (d_h), V (2 x d_h), c (2)
/// Biases are stored as column vectors.
class RnnParameters {
public:
    /// All-zero parameters.
    RnnParameters(CellKind cell, int hidden);

    /// Weight matrices uniform in [-1/sqrt(d_h), 1/sqrt(d_h)], biases zero.
    static RnnParameters initialized(CellKind cell, int hidden, Rng& rng);

    [[nodiscard]] CellKind cell() const noexcept { return cell_; }
    [[nodiscard]] int hidden() const noexcept { return hidden_; }

    [[nodiscard]] ParameterSet& tensors() noexcept { return tensors_; }
    [[nodiscard]] const ParameterSet& tensors() const noexcept { return tensors_; }

    Eigen::MatrixXd& operator[](std::string_view name) { return tensors_.at(name); }
    const Eigen::MatrixXd& operator[](std::string_view name) const { return tensors_.at(name); }

    [[nodiscard]] const Eigen::MatrixXd& output_weight() const { return tensors_[tensors_.size() - 2]; }
    [[nodiscard]] const Eigen::MatrixXd& output_bias() const { return tensors_[tensors_.size() - 1]; }

    /// Throws DimensionMismatch if any tensor has the wrong shape.
    void validate() const;

    // Tensor slots.
    static constexpr std::size_t kW = 0, kU = 1, kB = 2;
    static constexpr std::size_t kWz = 0, kWr = 1, kWh = 2, kUz = 3, kUr = 4, kUh = 5, kBz = 6,
                                 kBr = 7, kBh = 8;

    static std::vector<std::string> tensor_names(CellKind cell);

private:
    CellKind cell_;
    int hidden_;
    ParameterSet tensors_;
};

// ---------------------------------------------------------------------------
// Single-step operations
// ---------------------------------------------------------------------------

/// h_i = tanh(W sigma_{i-1} + U h_{i-1} + b).
HiddenState vanilla_cell(const RnnParameters& params, std::uint8_t prev_spin,
                         const HiddenState& prev_hidden);

/// GRU update: z, r logistic; candidate tanh(W_h x + U_h (r * h) + b_h);
/// h_i = (1 - z) * h_{i-1} + z * candidate.
HiddenState gru_cell(const RnnParameters& params, std::uint8_t prev_spin,
                     const HiddenState& prev_hidden);

/// Dispatches on params.cell().
HiddenState cell_step(const RnnParameters& params, std::uint8_t prev_spin,
                      const HiddenState& prev_hidden);

/// softmax(V h + c).
ConditionalDistribution output_distribution(const RnnParameters& params, const HiddenState& hidden);

/// Zeroes the channel whose count already reached N/2 and renormalizes.
/// Counters exclude sigma_0. Throws InvalidCounters unless
/// n_up + n_down < N, n_up <= N/2 and n_down <= N/2.
ConditionalDistribution u1_project(const ConditionalDistribution& y, int n_up, int n_down, int n);

// ---------------------------------------------------------------------------
// Sequence-level operations
// ---------------------------------------------------------------------------

/// Teacher-forced conditionals y_1..y_N for a configuration.
std::vector<ConditionalDistribution> conditionals(const RnnParameters& params,
                                                  std::span<const std::uint8_t> config,
                                                  SymmetryMode mode);

/// sum_i ln(y_i . sigma_i). kLogZero when the configuration has zero
/// probability (U(1) mode, outside the sector).
double log_prob(const RnnParameters& params, std::span<const std::uint8_t> config, SymmetryMode mode);

/// Batched log_prob; all configurations must share one length.
std::vector<double> log_prob_batch(const RnnParameters& params,
                                   std::span<const SpinConfiguration> configs, SymmetryMode mode);

/// sqrt(p(sigma)); 0 for zero-probability configurations.
double amplitude(const RnnParameters& params, std::span<const std::uint8_t> config, SymmetryMode mode);

/// Ancestral sampling of `count` chains of length `sites`. One key is drawn
/// from `rng`; every spin draw is then a function of (key, sample, site), so
/// the stream does not depend on how the work is chunked.
std::vector<SpinConfiguration> sample(const RnnParameters& params, int sites, std::size_t count,
                                      SymmetryMode mode, Rng& rng);

// ---------------------------------------------------------------------------
// Batched teacher-forced pass (shared with the gradient code)
// ---------------------------------------------------------------------------

/// Activations of a batched teacher-forced pass. Column b is sample b.
struct ForwardTrace {
    int sites = 0;
    int batch = 0;
    /// hidden[i] is h_i (d_h x B); hidden[0] is zero.
    std::vector<Eigen::MatrixXd> hidden;
    /// GRU only: update gate, reset gate and candidate for steps 1..N
    /// (index i - 1).
    std::vector<Eigen::MatrixXd> update_gate;
    std::vector<Eigen::MatrixXd> reset_gate;
    std::vector<Eigen::MatrixXd> candidate;
    /// Unprojected softmax y_i (2 x B), index i - 1.
    std::vector<Eigen::MatrixXd> probs;
    /// free(i - 1, b) is true when both channels survive the projection at
    /// site i, i.e. the site contributes to log p and to the gradient.
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> free;
    /// Input spins: spins(i, b) = sigma_{i+1} of sample b.
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> spins;
    /// log p per sample.
    Eigen::VectorXd log_prob;
};

/// Runs the cell over a batch of equal-length configurations. When
/// `keep_trace` is false only `log_prob` is filled.
ForwardTrace teacher_forced_pass(const RnnParameters& params,
                                 std::span<const SpinConfiguration> configs, SymmetryMode mode,
                                 bool keep_trace);

}  // namespace qsr
