// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/observables.hpp>
#include <qsr/training.hpp>

#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace qsr {

void TrainingConfig::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidArgument, what);
    };
    require(hidden_units >= 1, "hidden units must be at least 1");
    require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning rate must be positive");
    require(batch_size >= 1, "batch size must be at least 1");
    require(epochs >= 1, "epochs must be at least 1");
    require(eval_every >= 1, "eval_every must be at least 1");
    require(eval_samples >= 1, "eval_samples must be at least 1");
    require(checkpoint_every >= 0, "checkpoint_every must be nonnegative");
    require(j > 0.0, "J must be positive");
}

void check_sector(std::span<const SpinConfiguration> batch, SymmetryMode mode) {
    if (mode != SymmetryMode::U1) return;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!in_zero_sector(batch[i])) {
            throw SymmetryViolation(i, "sample " + std::to_string(i) + " [" + to_line(batch[i]) +
                                           "] lies outside the S^z = 0 sector");
        }
    }
}

double nll(const RnnParameters& params, std::span<const SpinConfiguration> batch, SymmetryMode mode) {
    if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "empty batch");
    check_sector(batch, mode);
    std::map<SpinConfiguration, std::size_t> counts;
    for (const auto& s : batch) ++counts[s];
    std::vector<SpinConfiguration> unique;
    unique.reserve(counts.size());
    for (const auto& [config, count] : counts) unique.push_back(config);
    const auto lp = log_prob_batch(params, unique, mode);
    double total = 0.0;
    std::size_t k = 0;
    for (const auto& [config, count] : counts) total += static_cast<double>(count) * lp[k++];
    return -total / static_cast<double>(batch.size());
}

GradientSet nll_gradient(const RnnParameters& params, const ForwardTrace& trace) {
    if (trace.hidden.size() != static_cast<std::size_t>(trace.sites) + 1) {
        throw Error(ErrorCode::InvalidArgument, "gradient needs a full forward trace");
    }
    using R = RnnParameters;
    const auto& t = params.tensors();
    GradientSet g = t.zeros_like();
    const int n = trace.sites;
    const Eigen::Index batch = trace.batch;
    const double scale = 1.0 / static_cast<double>(batch);
    const std::size_t out_w = t.size() - 2;
    const std::size_t out_b = t.size() - 1;

    Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(params.hidden(), batch);
    Eigen::MatrixXd dlogits(2, batch);
    Eigen::MatrixXd x(2, batch);
    for (int i = n - 1; i >= 0; --i) {
        const auto ui = static_cast<std::size_t>(i);
        const Eigen::MatrixXd& h = trace.hidden[ui + 1];
        const Eigen::MatrixXd& h_prev = trace.hidden[ui];
        const Eigen::MatrixXd& y = trace.probs[ui];

        // Softmax layer: d(-ln y_s)/d logits = y - e_s on free sites.
        for (Eigen::Index b = 0; b < batch; ++b) {
            if (trace.free(i, b)) {
                dlogits(0, b) = scale * y(0, b);
                dlogits(1, b) = scale * y(1, b);
                dlogits(trace.spins(i, b), b) -= scale;
            } else {
                dlogits(0, b) = 0.0;
                dlogits(1, b) = 0.0;
            }
        }
        g[out_w].noalias() += dlogits * h.transpose();
        g[out_b] += dlogits.rowwise().sum();
        dh.noalias() += t[out_w].transpose() * dlogits;

        x.setZero();
        for (Eigen::Index b = 0; b < batch; ++b) x(i == 0 ? 0 : trace.spins(i - 1, b), b) = 1.0;

        if (params.cell() == CellKind::Vanilla) {
            const Eigen::MatrixXd da = (dh.array() * (1.0 - h.array().square())).matrix();
            g[R::kW].noalias() += da * x.transpose();
            g[R::kU].noalias() += da * h_prev.transpose();
            g[R::kB] += da.rowwise().sum();
            dh.noalias() = t[R::kU].transpose() * da;
            continue;
        }

        const auto z = trace.update_gate[ui].array();
        const auto r = trace.reset_gate[ui].array();
        const auto c = trace.candidate[ui].array();
        const auto hp = h_prev.array();

        Eigen::MatrixXd dh_prev = (dh.array() * (1.0 - z)).matrix();
        const Eigen::MatrixXd dz = (dh.array() * (c - hp) * z * (1.0 - z)).matrix();
        const Eigen::MatrixXd dc = (dh.array() * z * (1.0 - c.square())).matrix();

        const Eigen::MatrixXd gated = (r * hp).matrix();
        g[R::kWh].noalias() += dc * x.transpose();
        g[R::kUh].noalias() += dc * gated.transpose();
        g[R::kBh] += dc.rowwise().sum();
        const Eigen::MatrixXd dgated = t[R::kUh].transpose() * dc;
        dh_prev.array() += dgated.array() * r;
        const Eigen::MatrixXd dr = (dgated.array() * hp * r * (1.0 - r)).matrix();

        g[R::kWz].noalias() += dz * x.transpose();
        g[R::kUz].noalias() += dz * h_prev.transpose();
        g[R::kBz] += dz.rowwise().sum();
        dh_prev.noalias() += t[R::kUz].transpose() * dz;

        g[R::kWr].noalias() += dr * x.transpose();
        g[R::kUr].noalias() += dr * h_prev.transpose();
        g[R::kBr] += dr.rowwise().sum();
        dh_prev.noalias() += t[R::kUr].transpose() * dr;

        dh = std::move(dh_prev);
    }
    return g;
}

GradientSet nll_gradient(const RnnParameters& params, std::span<const SpinConfiguration> batch,
                         SymmetryMode mode) {
    if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "empty batch");
    check_sector(batch, mode);
    return nll_gradient(params, teacher_forced_pass(params, batch, mode, true));
}

Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        probe[k] = x[k] + step;
        const double up = f(probe);
        probe[k] = x[k] - step;
        const double down = f(probe);
        probe[k] = x[k];
        grad[k] = (up - down) / (2.0 * step);
    }
    return grad;
}

GradientSet finite_diff_gradient(const RnnParameters& params, std::span<const SpinConfiguration> batch,
                                 SymmetryMode mode, double step) {
    RnnParameters probe = params;
    const auto loss = [&](const Eigen::VectorXd& flat) {
        probe.tensors().assign_flat(flat);
        return nll(probe, batch, mode);
    };
    GradientSet g = params.tensors().zeros_like();
    g.assign_flat(central_difference(loss, params.tensors().flatten(), step));
    return g;
}

void sgd_step(RnnParameters& params, const GradientSet& grads, double lr) {
    if (!(lr >= 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be nonnegative");
    params.tensors().axpy(-lr, grads);
}

double reference_energy(const EvaluationContext& context) {
    return context.gs ? context.gs->energy : free_fermion_energy(context.spec.n, context.spec.j);
}

MetricsRecord evaluate_rnn(const RnnParameters& params, SymmetryMode mode, const EvaluationContext& context,
                           int epoch, Rng& rng) {
    if (context.eval_samples < 1) throw Error(ErrorCode::InvalidArgument, "eval_samples must be positive");
    const int n = context.spec.n;
    MetricsRecord record;
    record.epoch = epoch;

    const auto samples = sample(params, n, static_cast<std::size_t>(context.eval_samples), mode, rng);
    const LogAmplitudeBatchFn log_psi = [&](std::span<const SpinConfiguration> configs) {
        auto lp = log_prob_batch(params, configs, mode);
        for (double& v : lp) v *= 0.5;
        return lp;
    };
    const EnergyEstimate e = energy_estimate(log_psi, samples, context.spec);
    record.energy = e.mean;
    record.energy_stderr = e.standard_error;
    record.epsilon = energy_difference(e.mean, reference_energy(context), n);
    record.frac_out_sector = sector_fraction(samples);

    if (context.gs) {
        std::vector<SpinConfiguration> basis(context.gs->basis.size());
        for (std::size_t s = 0; s < basis.size(); ++s) basis[s] = context.gs->basis.state(s);
        auto amps = log_prob_batch(params, basis, mode);
        for (double& v : amps) v = v == kLogZero ? 0.0 : std::exp(0.5 * v);
        record.infidelity = 1.0 - fidelity(*context.gs, amps);
    }
    if (context.dataset) record.nll = nll(params, context.dataset->samples, mode);
    return record;
}

void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng) {
    for (std::size_t i = indices.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(indices[i - 1], indices[j]);
    }
}

TrainingResult train(const TrainingConfig& config, const Dataset& dataset, const GroundState* gs,
                     const MetricsSink& sink, const RnnCheckpointSink& checkpoints) {
    config.validate();
    dataset.validate();
    check_sector(dataset.samples, config.mode);
    const XYChainSpec spec{dataset.n, config.j};
    if (gs && (gs->spec.n != dataset.n)) {
        throw Error(ErrorCode::DimensionMismatch, "ground state and dataset sizes differ");
    }

    Rng init = make_stream(config.seed, "init");
    TrainingResult result{RnnParameters::initialized(config.cell, config.hidden_units, init), {}, 0};
    Rng shuffle = make_stream(config.seed, "shuffle");
    const EvaluationContext context{spec, gs, &dataset, config.eval_samples};

    const auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(dataset.size());
    std::vector<SpinConfiguration> batch;
    batch.reserve(static_cast<std::size_t>(config.batch_size));

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle_indices(order, shuffle);
        for (std::size_t first = 0; first < order.size(); first += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t last = std::min(order.size(), first + static_cast<std::size_t>(config.batch_size));
            batch.clear();
            for (std::size_t k = first; k < last; ++k) batch.push_back(dataset.samples[order[k]]);
            const auto trace = teacher_forced_pass(result.params, batch, config.mode, true);
            sgd_step(result.params, nll_gradient(result.params, trace), config.learning_rate);
        }
        result.epochs_run = epoch;

        bool keep_going = true;
        const bool final_epoch = epoch == config.epochs;
        if (epoch % config.eval_every == 0 || final_epoch) {
            Rng eval = make_stream(config.seed, "eval", static_cast<std::uint64_t>(epoch));
            MetricsRecord record = evaluate_rnn(result.params, config.mode, context, epoch, eval);
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
