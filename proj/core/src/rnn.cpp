// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/rnn.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace qsr {

std::string_view to_string(CellKind kind) noexcept {
    return kind == CellKind::Vanilla ? "vanilla" : "gru";
}

std::string_view to_string(SymmetryMode mode) noexcept {
    return mode == SymmetryMode::None ? "none" : "u1";
}

CellKind parse_cell_kind(std::string_view text) {
    if (text == "vanilla") return CellKind::Vanilla;
    if (text == "gru") return CellKind::Gru;
    throw Error(ErrorCode::InvalidArgument, "unknown cell kind '" + std::string(text) + "'");
}

SymmetryMode parse_symmetry_mode(std::string_view text) {
    if (text == "none") return SymmetryMode::None;
    if (text == "u1") return SymmetryMode::U1;
    throw Error(ErrorCode::InvalidArgument, "unknown symmetry mode '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

std::vector<std::string> RnnParameters::tensor_names(CellKind cell) {
    if (cell == CellKind::Vanilla) return {"W", "U", "b", "V", "c"};
    return {"W_z", "W_r", "W_h", "U_z", "U_r", "U_h", "b_z", "b_r", "b_h", "V", "c"};
}

RnnParameters::RnnParameters(CellKind cell, int hidden) : cell_(cell), hidden_(hidden) {
    if (hidden < 1) throw Error(ErrorCode::InvalidArgument, "hidden dimension must be positive");
    const int gates = cell == CellKind::Vanilla ? 1 : 3;
    const auto names = tensor_names(cell);
    std::size_t slot = 0;
    for (int g = 0; g < gates; ++g) tensors_.add(names[slot++], Eigen::MatrixXd::Zero(hidden, 2));
    for (int g = 0; g < gates; ++g) tensors_.add(names[slot++], Eigen::MatrixXd::Zero(hidden, hidden));
    for (int g = 0; g < gates; ++g) tensors_.add(names[slot++], Eigen::MatrixXd::Zero(hidden, 1));
    tensors_.add(names[slot++], Eigen::MatrixXd::Zero(2, hidden));
    tensors_.add(names[slot++], Eigen::MatrixXd::Zero(2, 1));
}

RnnParameters RnnParameters::initialized(CellKind cell, int hidden, Rng& rng) {
    RnnParameters params(cell, hidden);
    const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
    auto& t = params.tensors_;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.name(i).front() == 'b' || t.name(i) == "c") continue;
        for (Eigen::Index r = 0; r < t[i].rows(); ++r) {
            for (Eigen::Index c = 0; c < t[i].cols(); ++c) t[i](r, c) = scale * (2.0 * uniform01(rng) - 1.0);
        }
    }
    return params;
}

void RnnParameters::validate() const {
    const RnnParameters reference(cell_, hidden_);
    if (!tensors_.same_layout(reference.tensors_)) {
        throw Error(ErrorCode::DimensionMismatch, "parameter shapes do not match cell kind and d_h");
    }
}

// ---------------------------------------------------------------------------
// Batched kernels
// ---------------------------------------------------------------------------

namespace {

/// tanh through the vectorized exponential; Eigen only vectorizes tanh for
/// float. Absolute error stays at the 1e-16 level.
Eigen::MatrixXd tanh_of(const Eigen::MatrixXd& x) {
    return (1.0 - 2.0 / ((2.0 * x.array()).exp() + 1.0)).matrix();
}

Eigen::MatrixXd one_hot(std::span<const std::uint8_t> spins) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(spins.size()));
    for (std::size_t b = 0; b < spins.size(); ++b) x(spins[b], static_cast<Eigen::Index>(b)) = 1.0;
    return x;
}

struct GruStep {
    Eigen::MatrixXd z;
    Eigen::MatrixXd r;
    Eigen::MatrixXd candidate;
};

Eigen::MatrixXd vanilla_forward(const RnnParameters& p, const Eigen::MatrixXd& x,
                                const Eigen::MatrixXd& h_prev) {
    const auto& t = p.tensors();
    Eigen::MatrixXd pre = t[RnnParameters::kW] * x;
    pre.noalias() += t[RnnParameters::kU] * h_prev;
    pre.colwise() += t[RnnParameters::kB].col(0);
    return tanh_of(pre);
}

Eigen::MatrixXd gru_forward(const RnnParameters& p, const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& h_prev, GruStep& step) {
    using R = RnnParameters;
    const auto& t = p.tensors();
    Eigen::MatrixXd pre = t[R::kWz] * x;
    pre.noalias() += t[R::kUz] * h_prev;
    pre.colwise() += t[R::kBz].col(0);
    step.z = pre.array().logistic().matrix();

    pre = t[R::kWr] * x;
    pre.noalias() += t[R::kUr] * h_prev;
    pre.colwise() += t[R::kBr].col(0);
    step.r = pre.array().logistic().matrix();

    const Eigen::MatrixXd gated = step.r.cwiseProduct(h_prev);
    pre = t[R::kWh] * x;
    pre.noalias() += t[R::kUh] * gated;
    pre.colwise() += t[R::kBh].col(0);
    step.candidate = tanh_of(pre);

    return ((1.0 - step.z.array()) * h_prev.array() + step.z.array() * step.candidate.array()).matrix();
}

Eigen::MatrixXd cell_forward(const RnnParameters& p, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& h_prev, GruStep& step) {
    return p.cell() == CellKind::Vanilla ? vanilla_forward(p, x, h_prev) : gru_forward(p, x, h_prev, step);
}

/// Column-wise softmax of V h + c; also returns log-probabilities.
void softmax_layer(const RnnParameters& p, const Eigen::MatrixXd& h, Eigen::MatrixXd& probs,
                   Eigen::MatrixXd& log_probs) {
    Eigen::MatrixXd logits = p.output_weight() * h;
    logits.colwise() += p.output_bias().col(0);
    probs.resize(2, logits.cols());
    log_probs.resize(2, logits.cols());
    for (Eigen::Index b = 0; b < logits.cols(); ++b) {
        const double m = std::max(logits(0, b), logits(1, b));
        const double e0 = std::exp(logits(0, b) - m);
        const double e1 = std::exp(logits(1, b) - m);
        const double s = e0 + e1;
        const double log_s = std::log(s);
        probs(0, b) = e0 / s;
        probs(1, b) = e1 / s;
        log_probs(0, b) = logits(0, b) - m - log_s;
        log_probs(1, b) = logits(1, b) - m - log_s;
    }
}

void check_hidden(const RnnParameters& params, const HiddenState& h) {
    if (h.size() != params.hidden()) {
        throw Error(ErrorCode::DimensionMismatch, "hidden state length " + std::to_string(h.size()) +
                                                      " != d_h " + std::to_string(params.hidden()));
    }
}

void check_mode(SymmetryMode mode, std::size_t sites) {
    if (sites == 0) throw Error(ErrorCode::DimensionMismatch, "configuration is empty");
    if (mode == SymmetryMode::U1 && sites % 2 != 0) {
        throw Error(ErrorCode::OddN, "U(1) mode needs an even number of sites");
    }
}

/// Projection without precondition checks; the teacher-forced path may see
/// counters past N/2 for out-of-sector data.
ConditionalDistribution project(const ConditionalDistribution& y, int n_up, int n_down, int n) {
    const double p0 = 2 * n_up < n ? y[0] : 0.0;
    const double p1 = 2 * n_down < n ? y[1] : 0.0;
    const double norm = p0 + p1;
    return {p0 / norm, p1 / norm};
}

}  // namespace

// ---------------------------------------------------------------------------
// Single-step operations
// ---------------------------------------------------------------------------

HiddenState vanilla_cell(const RnnParameters& params, std::uint8_t prev_spin,
                         const HiddenState& prev_hidden) {
    if (params.cell() != CellKind::Vanilla) throw Error(ErrorCode::DimensionMismatch, "not a vanilla cell");
    check_hidden(params, prev_hidden);
    const std::uint8_t spins[1] = {prev_spin};
    return vanilla_forward(params, one_hot(spins), prev_hidden).col(0);
}

HiddenState gru_cell(const RnnParameters& params, std::uint8_t prev_spin,
                     const HiddenState& prev_hidden) {
    if (params.cell() != CellKind::Gru) throw Error(ErrorCode::DimensionMismatch, "not a GRU cell");
    check_hidden(params, prev_hidden);
    const std::uint8_t spins[1] = {prev_spin};
    GruStep step;
    return gru_forward(params, one_hot(spins), prev_hidden, step).col(0);
}

HiddenState cell_step(const RnnParameters& params, std::uint8_t prev_spin,
                      const HiddenState& prev_hidden) {
    return params.cell() == CellKind::Vanilla ? vanilla_cell(params, prev_spin, prev_hidden)
                                              : gru_cell(params, prev_spin, prev_hidden);
}

ConditionalDistribution output_distribution(const RnnParameters& params, const HiddenState& hidden) {
    check_hidden(params, hidden);
    Eigen::MatrixXd probs;
    Eigen::MatrixXd log_probs;
    softmax_layer(params, hidden, probs, log_probs);
    return {probs(0, 0), probs(1, 0)};
}

ConditionalDistribution u1_project(const ConditionalDistribution& y, int n_up, int n_down, int n) {
    if (n_up < 0 || n_down < 0 || n_up + n_down >= n || 2 * n_up > n || 2 * n_down > n) {
        throw Error(ErrorCode::InvalidCounters,
                    "counters (" + std::to_string(n_up) + ", " + std::to_string(n_down) +
                        ") are not reachable for N = " + std::to_string(n));
    }
    return project(y, n_up, n_down, n);
}

// ---------------------------------------------------------------------------
// Sequence-level operations
// ---------------------------------------------------------------------------

std::vector<ConditionalDistribution> conditionals(const RnnParameters& params,
                                                  std::span<const std::uint8_t> config,
                                                  SymmetryMode mode) {
    check_mode(mode, config.size());
    const int n = static_cast<int>(config.size());
    std::vector<ConditionalDistribution> out;
    out.reserve(config.size());
    HiddenState h = HiddenState::Zero(params.hidden());
    std::uint8_t prev = 0;
    int n_up = 0;
    int n_down = 0;
    for (int i = 0; i < n; ++i) {
        h = cell_step(params, prev, h);
        ConditionalDistribution y = output_distribution(params, h);
        if (mode == SymmetryMode::U1) y = project(y, n_up, n_down, n);
        out.push_back(y);
        prev = config[static_cast<std::size_t>(i)];
        (prev ? n_down : n_up) += 1;
    }
    return out;
}

ForwardTrace teacher_forced_pass(const RnnParameters& params,
                                 std::span<const SpinConfiguration> configs, SymmetryMode mode,
                                 bool keep_trace) {
    if (configs.empty()) throw Error(ErrorCode::InvalidArgument, "empty batch");
    const std::size_t n_sites = configs.front().size();
    check_mode(mode, n_sites);
    for (const auto& c : configs) {
        if (c.size() != n_sites) throw Error(ErrorCode::DimensionMismatch, "batch mixes configuration lengths");
    }

    const int n = static_cast<int>(n_sites);
    const auto batch = static_cast<Eigen::Index>(configs.size());

    ForwardTrace trace;
    trace.sites = n;
    trace.batch = static_cast<int>(batch);
    trace.spins.resize(n, batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (int i = 0; i < n; ++i) trace.spins(i, b) = configs[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
    }
    trace.log_prob = Eigen::VectorXd::Zero(batch);
    if (keep_trace) {
        trace.free.resize(n, batch);
        trace.hidden.reserve(static_cast<std::size_t>(n) + 1);
        trace.probs.reserve(static_cast<std::size_t>(n));
    }

    std::vector<int> n_up(static_cast<std::size_t>(batch), 0);
    std::vector<int> n_down(static_cast<std::size_t>(batch), 0);
    std::vector<std::uint8_t> prev(static_cast<std::size_t>(batch), 0);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(params.hidden(), batch);
    if (keep_trace) trace.hidden.push_back(h);
    GruStep step;
    Eigen::MatrixXd probs;
    Eigen::MatrixXd log_probs;

    for (int i = 0; i < n; ++i) {
        h = cell_forward(params, one_hot(prev), h, step);
        softmax_layer(params, h, probs, log_probs);
        for (Eigen::Index b = 0; b < batch; ++b) {
            const auto ub = static_cast<std::size_t>(b);
            const std::uint8_t s = trace.spins(i, b);
            bool free = true;
            if (mode == SymmetryMode::U1) {
                const bool allow[2] = {2 * n_up[ub] < n, 2 * n_down[ub] < n};
                free = allow[0] && allow[1];
                if (!allow[s]) trace.log_prob[b] = kLogZero;
            }
            if (free) trace.log_prob[b] += log_probs(s, b);
            if (keep_trace) trace.free(i, b) = free;
            (s ? n_down[ub] : n_up[ub]) += 1;
            prev[ub] = s;
        }
        if (keep_trace) {
            trace.hidden.push_back(h);
            trace.probs.push_back(probs);
            if (params.cell() == CellKind::Gru) {
                trace.update_gate.push_back(step.z);
                trace.reset_gate.push_back(step.r);
                trace.candidate.push_back(step.candidate);
            }
        }
    }
    return trace;
}

std::vector<double> log_prob_batch(const RnnParameters& params,
                                   std::span<const SpinConfiguration> configs, SymmetryMode mode) {
    constexpr std::size_t kChunk = 2048;
    std::vector<double> out;
    out.reserve(configs.size());
    for (std::size_t start = 0; start < configs.size(); start += kChunk) {
        const auto chunk = configs.subspan(start, std::min(kChunk, configs.size() - start));
        const auto trace = teacher_forced_pass(params, chunk, mode, false);
        out.insert(out.end(), trace.log_prob.data(), trace.log_prob.data() + trace.log_prob.size());
    }
    return out;
}

double log_prob(const RnnParameters& params, std::span<const std::uint8_t> config, SymmetryMode mode) {
    const SpinConfiguration c(config.begin(), config.end());
    return teacher_forced_pass(params, std::span<const SpinConfiguration>(&c, 1), mode, false).log_prob[0];
}

double amplitude(const RnnParameters& params, std::span<const std::uint8_t> config, SymmetryMode mode) {
    const double lp = log_prob(params, config, mode);
    return lp == kLogZero ? 0.0 : std::exp(0.5 * lp);
}

std::vector<SpinConfiguration> sample(const RnnParameters& params, int sites, std::size_t count,
                                      SymmetryMode mode, Rng& rng) {
    if (sites < 1) throw Error(ErrorCode::InvalidArgument, "sample needs at least one site");
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    check_mode(mode, static_cast<std::size_t>(sites));

    const std::uint64_t key = rng();
    constexpr std::size_t kChunk = 4096;
    std::vector<SpinConfiguration> out(count, SpinConfiguration(static_cast<std::size_t>(sites)));

    GruStep step;
    Eigen::MatrixXd probs;
    Eigen::MatrixXd log_probs;
    for (std::size_t start = 0; start < count; start += kChunk) {
        const std::size_t len = std::min(kChunk, count - start);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(params.hidden(), static_cast<Eigen::Index>(len));
        std::vector<std::uint8_t> prev(len, 0);
        std::vector<int> n_up(len, 0);
        std::vector<int> n_down(len, 0);
        for (int i = 0; i < sites; ++i) {
            h = cell_forward(params, one_hot(prev), h, step);
            softmax_layer(params, h, probs, log_probs);
            for (std::size_t b = 0; b < len; ++b) {
                const auto col = static_cast<Eigen::Index>(b);
                ConditionalDistribution y{probs(0, col), probs(1, col)};
                if (mode == SymmetryMode::U1) y = project(y, n_up[b], n_down[b], sites);
                const double u = counter_uniform(key, start + b, static_cast<std::uint64_t>(i));
                const std::uint8_t s = u < y[0] ? 0 : 1;
                out[start + b][static_cast<std::size_t>(i)] = s;
                (s ? n_down[b] : n_up[b]) += 1;
                prev[b] = s;
            }
        }
    }
    return out;
}

}  // namespace qsr
