// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file training.hpp
 * @brief Maximum-likelihood training of the recurrent wavefunction.
 *
 * Loss: L(theta) = -(1/|B|) sum_{sigma in B} ln p_theta(sigma). Gradients
 * are exact reverse-mode BPTT through the cell, the softmax layer and the
 * U(1) projection (sites where one channel is masked contribute a constant
 * and therefore nothing to the gradient).
 */

#pragma once

#include <qsr/metrics.hpp>
#include <qsr/parameters.hpp>
#include <qsr/random.hpp>
#include <qsr/rnn.hpp>
#include <qsr/xy_chain.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qsr {

/// One array per named parameter, same layout as RnnParameters::tensors().
using GradientSet = ParameterSet;

struct TrainingConfig {
    CellKind cell = CellKind::Gru;
    int hidden_units = 100;
    std::uint64_t seed = 1;
    double learning_rate = 0.001;
    int batch_size = 50;
    int epochs = 1000;
    SymmetryMode mode = SymmetryMode::U1;
    int eval_every = 10;
    int eval_samples = 10000;
    /// Parameters are handed to the checkpoint sink every this many epochs
    /// and after the last epoch. 0 disables the schedule.
    int checkpoint_every = 200;
    double j = 1.0;
    /// Fill MetricsRecord::seconds. Off by default so metrics files are
    /// byte-identical across reruns.
    bool record_time = false;

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
};

/// Throws SymmetryViolation naming the first out-of-sector sample when
/// mode is U1.
void check_sector(std::span<const SpinConfiguration> batch, SymmetryMode mode);

/// Mean NLL over the batch. Duplicate configurations are evaluated once and
/// summed in lexicographic order, so the value depends only on the multiset.
double nll(const RnnParameters& params, std::span<const SpinConfiguration> batch, SymmetryMode mode);

/// Exact gradient of nll().
GradientSet nll_gradient(const RnnParameters& params, std::span<const SpinConfiguration> batch,
                         SymmetryMode mode);

/// Same gradient from an existing trace (keep_trace = true).
GradientSet nll_gradient(const RnnParameters& params, const ForwardTrace& trace);

/// Central differences (f(x + h e_k) - f(x - h e_k)) / 2h for every k.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double step);

/// Central-difference gradient of nll() over every parameter.
GradientSet finite_diff_gradient(const RnnParameters& params, std::span<const SpinConfiguration> batch,
                                 SymmetryMode mode, double step);

/// theta <- theta - lr * g. Throws DimensionMismatch on layout mismatch and
/// InvalidArgument for negative lr.
void sgd_step(RnnParameters& params, const GradientSet& grads, double lr);

/// Everything needed to turn parameters into one MetricsRecord.
struct EvaluationContext {
    XYChainSpec spec;
    const GroundState* gs = nullptr;    ///< infidelity and exact reference energy
    const Dataset* dataset = nullptr;   ///< NLL column
    int eval_samples = 10000;
};

/// Reference energy: gs.energy when available, else the free-fermion value.
double reference_energy(const EvaluationContext& context);

/// Draws eval_samples configurations from the model and fills every metric
/// the context allows. `epoch` is copied into the record.
MetricsRecord evaluate_rnn(const RnnParameters& params, SymmetryMode mode, const EvaluationContext& context,
                           int epoch, Rng& rng);

/// Called with (epoch, parameters) on the checkpoint schedule.
using RnnCheckpointSink = std::function<void(int, const RnnParameters&)>;

struct TrainingResult {
    RnnParameters params;
    std::vector<MetricsRecord> metrics;
    int epochs_run = 0;
};

/// SGD over shuffled mini-batches (the last short batch is kept). Metrics
/// are produced every eval_every epochs and after the final epoch.
///
/// Random streams derived from config.seed: "init" for the parameters,
/// "shuffle" for the epoch permutations, ("eval", epoch) for metric samples.
TrainingResult train(const TrainingConfig& config, const Dataset& dataset, const GroundState* gs,
                     const MetricsSink& sink = {}, const RnnCheckpointSink& checkpoints = {});

/// In-place Fisher-Yates shuffle using rng() modulo the remaining length.
void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng);

}  // namespace qsr
