// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <qsr/metrics.hpp>
#include <qsr/rbm.hpp>
#include <qsr/training.hpp>
#include <qsr/xy_chain.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace qsr {

struct RbmTrainingConfig {
    int hidden_units = 100;
    std::uint64_t seed = 1234;
    double base_lr = 0.01;
    double lr_decay = 0.999;  ///< lr_t = base_lr * lr_decay^t, t the 0-based epoch
    int positive_batch = 100;
    int negative_batch = 200;
    int gibbs_k = 100;
    int epochs = 2000;
    int eval_every = 10;
    int eval_samples = 10000;
    int checkpoint_every = 200;
    double j = 1.0;
    bool record_time = false;

    void validate() const;

    /// Tabulated n_h and seed for a chain of N sites; other fields default.
    static RbmTrainingConfig defaults_for(int n);
};

/// Hidden-layer size from the baseline table: 10 (N = 2), 50 (N = 4), 100 otherwise.
int default_rbm_hidden_units(int n);
/// Seed from the baseline table; 1234 for sizes it does not list.
std::uint64_t default_rbm_seed(int n);

/// Model samples: exact inverse-CDF draws for N <= 20, otherwise the end
/// points of 1000-step Gibbs chains started from uniform random states.
std::vector<SpinConfiguration> sample_rbm(const RbmParameters& rbm, std::size_t count, Rng& rng);

/// Metrics for an RBM from sample_rbm() draws; NLL and infidelity need
/// exact enumeration and are left empty above N = 20.
MetricsRecord evaluate_rbm(const RbmParameters& rbm, const EvaluationContext& context, int epoch, Rng& rng);

using RbmCheckpointSink = std::function<void(int, const RbmParameters&)>;

struct RbmTrainingResult {
    RbmParameters params;
    std::vector<MetricsRecord> metrics;
    int epochs_run = 0;
};

/// One epoch is a pass over the shuffled dataset in positive-phase batches.
/// Each update draws negative_batch chain seeds uniformly from the data and
/// runs CD_k from them.
///
/// Streams: "init", "shuffle", "negative" and ("eval", epoch).
RbmTrainingResult rbm_train(const RbmTrainingConfig& config, const Dataset& dataset, const GroundState* gs,
                            const MetricsSink& sink = {}, const RbmCheckpointSink& checkpoints = {});

}  // namespace qsr
