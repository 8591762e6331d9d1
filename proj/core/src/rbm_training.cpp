// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/observables.hpp>
#include <qsr/rbm_training.hpp>

#include <chrono>
#include <cmath>
#include <numeric>

namespace qsr {

namespace {

/// Long Gibbs chains for evaluation above the enumeration limit.
constexpr int kEvaluationGibbsSteps = 1000;

}  // namespace

void RbmTrainingConfig::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidArgument, what);
    };
    require(hidden_units >= 1, "hidden units must be at least 1");
    require(base_lr > 0.0 && std::isfinite(base_lr), "learning rate must be positive");
    require(lr_decay > 0.0 && lr_decay <= 1.0, "learning-rate decay must lie in (0, 1]");
    require(positive_batch >= 1, "positive batch must be at least 1");
    require(negative_batch >= 1, "negative batch must be at least 1");
    require(gibbs_k >= 1, "k must be at least 1");
    require(epochs >= 1, "epochs must be at least 1");
    require(eval_every >= 1, "eval_every must be at least 1");
    require(eval_samples >= 1, "eval_samples must be at least 1");
    require(checkpoint_every >= 0, "checkpoint_every must be nonnegative");
    require(j > 0.0, "J must be positive");
}

int default_rbm_hidden_units(int n) {
    if (n <= 2) return 10;
    if (n <= 4) return 50;
    return 100;
}

std::uint64_t default_rbm_seed(int n) {
    switch (n) {
        case 2: return 7777;
        case 4:
        case 30:
        case 50: return 9999;
        case 6: return 2222;
        case 16:
        case 40: return 1357;
        default: return 1234;
    }
}

RbmTrainingConfig RbmTrainingConfig::defaults_for(int n) {
    RbmTrainingConfig config;
    config.hidden_units = default_rbm_hidden_units(n);
    config.seed = default_rbm_seed(n);
    return config;
}

std::vector<SpinConfiguration> sample_rbm(const RbmParameters& rbm, std::size_t count, Rng& rng) {
    if (rbm.visible() <= kMaxRbmEnumerationSites) return sample_exact(rbm, count, rng);
    std::vector<SpinConfiguration> seeds(count, SpinConfiguration(static_cast<std::size_t>(rbm.visible())));
    for (auto& s : seeds) {
        for (auto& bit : s) bit = uniform01(rng) < 0.5 ? 0 : 1;
    }
    return cd_k(rbm, seeds, kEvaluationGibbsSteps, rng);
}

MetricsRecord evaluate_rbm(const RbmParameters& rbm, const EvaluationContext& context, int epoch, Rng& rng) {
    if (context.eval_samples < 1) throw Error(ErrorCode::InvalidArgument, "eval_samples must be positive");
    const int n = context.spec.n;
    if (rbm.visible() != n) throw Error(ErrorCode::DimensionMismatch, "RBM size does not match the chain");
    const bool enumerable = n <= kMaxRbmEnumerationSites;
    const auto count = static_cast<std::size_t>(context.eval_samples);

    const auto samples = sample_rbm(rbm, count, rng);

    MetricsRecord record;
    record.epoch = epoch;
    const LogAmplitudeBatchFn log_psi = [&](std::span<const SpinConfiguration> configs) {
        std::vector<double> out;
        out.reserve(configs.size());
        for (const auto& c : configs) out.push_back(-0.5 * effective_energy(rbm, c));
        return out;
    };
    const EnergyEstimate e = energy_estimate(log_psi, samples, context.spec);
    record.energy = e.mean;
    record.energy_stderr = e.standard_error;
    record.epsilon = energy_difference(e.mean, reference_energy(context), n);
    record.frac_out_sector = sector_fraction(samples);

    if (enumerable && (context.gs || context.dataset)) {
        const Eigen::VectorXd p = exact_distribution(rbm);
        if (context.gs) {
            std::vector<double> amps(context.gs->basis.size());
            for (std::size_t s = 0; s < amps.size(); ++s) amps[s] = std::sqrt(p[context.gs->basis.code(s)]);
            record.infidelity = 1.0 - fidelity(*context.gs, amps);
        }
        if (context.dataset) {
            double total = 0.0;
            for (const auto& s : context.dataset->samples) total += std::log(p[static_cast<Eigen::Index>(pack(s))]);
            record.nll = -total / static_cast<double>(context.dataset->size());
        }
    }
    return record;
}

RbmTrainingResult rbm_train(const RbmTrainingConfig& config, const Dataset& dataset, const GroundState* gs,
                            const MetricsSink& sink, const RbmCheckpointSink& checkpoints) {
    config.validate();
    dataset.validate();
    if (gs && gs->spec.n != dataset.n) throw Error(ErrorCode::DimensionMismatch, "ground state and dataset sizes differ");

    Rng init = make_stream(config.seed, "init");
    RbmTrainingResult result{RbmParameters::initialized(dataset.n, config.hidden_units, init), {}, 0};
    Rng shuffle = make_stream(config.seed, "shuffle");
    Rng negative = make_stream(config.seed, "negative");
    const EvaluationContext context{XYChainSpec{dataset.n, config.j}, gs, &dataset, config.eval_samples};

    const auto start = std::chrono::steady_clock::now();
    const auto pos = static_cast<std::size_t>(config.positive_batch);
    std::vector<std::size_t> order(dataset.size());
    std::vector<SpinConfiguration> batch;
    std::vector<SpinConfiguration> seeds(static_cast<std::size_t>(config.negative_batch));

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = config.base_lr * std::pow(config.lr_decay, epoch - 1);
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle_indices(order, shuffle);
        for (std::size_t first = 0; first < order.size(); first += pos) {
            const std::size_t last = std::min(order.size(), first + pos);
            batch.clear();
            for (std::size_t k = first; k < last; ++k) batch.push_back(dataset.samples[order[k]]);
            for (auto& s : seeds) s = dataset.samples[static_cast<std::size_t>(negative() % dataset.size())];
            const auto gamma = cd_k(result.params, seeds, config.gibbs_k, negative);
            result.params.axpy(-lr, kl_gradient(result.params, batch, gamma));
        }
        result.epochs_run = epoch;

        bool keep_going = true;
        const bool final_epoch = epoch == config.epochs;
        if (epoch % config.eval_every == 0 || final_epoch) {
            Rng eval = make_stream(config.seed, "eval", static_cast<std::uint64_t>(epoch));
            MetricsRecord record = evaluate_rbm(result.params, context, epoch, eval);
            if (config.record_time) {
                record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }
            result.metrics.push_back(record);
            if (sink) keep_going = sink(record);
        }
        const bool scheduled = config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0;
        if (checkpoints && (scheduled || final_epoch || !keep_going)) checkpoints(epoch, result.params);
        if (!keep_going) break;
    }
    return result;
}

}  // namespace qsr
