// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/rbm.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace qsr {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd as_vector(std::span<const std::uint8_t> bits) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) v[static_cast<Eigen::Index>(i)] = bits[i];
    return v;
}

void check_visible(const RbmParameters& rbm, std::size_t length) {
    if (static_cast<int>(length) != rbm.visible()) {
        throw Error(ErrorCode::DimensionMismatch, "configuration length " + std::to_string(length) +
                                                      " != visible units " + std::to_string(rbm.visible()));
    }
}

void check_enumerable(const RbmParameters& rbm) {
    if (rbm.visible() > kMaxRbmEnumerationSites) {
        throw Error(ErrorCode::SizeLimitExceeded, "exact RBM enumeration needs N <= 20");
    }
}

/// E_eff for every visible code, evaluated in blocks.
Eigen::VectorXd all_energies(const RbmParameters& rbm) {
    check_enumerable(rbm);
    const int n = rbm.visible();
    const Eigen::Index dim = Eigen::Index{1} << n;
    constexpr Eigen::Index kBlock = 4096;
    Eigen::VectorXd energies(dim);
    for (Eigen::Index start = 0; start < dim; start += kBlock) {
        const Eigen::Index len = std::min(kBlock, dim - start);
        Eigen::MatrixXd v(len, n);
        for (Eigen::Index r = 0; r < len; ++r) {
            const auto code = static_cast<std::uint64_t>(start + r);
            for (int i = 0; i < n; ++i) v(r, i) = static_cast<double>((code >> (n - 1 - i)) & 1u);
        }
        Eigen::MatrixXd act = v * rbm.weights;
        act.rowwise() += rbm.hidden_bias.transpose();
        const Eigen::VectorXd bias_term = v * rbm.visible_bias;
        for (Eigen::Index r = 0; r < len; ++r) {
            double e = -bias_term[r];
            for (Eigen::Index j = 0; j < act.cols(); ++j) e -= softplus(act(r, j));
            energies[start + r] = e;
        }
    }
    return energies;
}

double log_sum_exp_neg(const Eigen::VectorXd& energies) {
    const double m = (-energies).maxCoeff();
    return m + std::log((-energies.array() - m).exp().sum());
}

}  // namespace

RbmParameters RbmParameters::zeros(int visible, int hidden) {
    if (visible < 1 || hidden < 1) throw Error(ErrorCode::InvalidArgument, "RBM layers must be nonempty");
    return {Eigen::MatrixXd::Zero(visible, hidden), Eigen::VectorXd::Zero(visible),
            Eigen::VectorXd::Zero(hidden)};
}

RbmParameters RbmParameters::initialized(int visible, int hidden, Rng& rng) {
    RbmParameters rbm = zeros(visible, hidden);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(visible)));
    for (Eigen::Index i = 0; i < rbm.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < rbm.weights.cols(); ++j) rbm.weights(i, j) = normal(rng);
    }
    return rbm;
}

void RbmParameters::validate() const {
    if (weights.rows() != visible_bias.size() || weights.cols() != hidden_bias.size()) {
        throw Error(ErrorCode::DimensionMismatch, "RBM weight shape does not match the biases");
    }
}

void RbmParameters::axpy(double scale, const RbmParameters& other) {
    if (weights.rows() != other.weights.rows() || weights.cols() != other.weights.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "RBM layouts differ");
    }
    weights += scale * other.weights;
    visible_bias += scale * other.visible_bias;
    hidden_bias += scale * other.hidden_bias;
}

double effective_energy(const RbmParameters& rbm, std::span<const std::uint8_t> config) {
    check_visible(rbm, config.size());
    const Eigen::VectorXd v = as_vector(config);
    const Eigen::VectorXd act = rbm.hidden_bias + rbm.weights.transpose() * v;
    double e = -v.dot(rbm.visible_bias);
    for (Eigen::Index j = 0; j < act.size(); ++j) e -= softplus(act[j]);
    return e;
}

Eigen::VectorXd hidden_activation(const RbmParameters& rbm, std::span<const std::uint8_t> config) {
    check_visible(rbm, config.size());
    const Eigen::VectorXd act = rbm.hidden_bias + rbm.weights.transpose() * as_vector(config);
    return act.unaryExpr([](double x) { return logistic(x); });
}

Eigen::VectorXd visible_activation(const RbmParameters& rbm, std::span<const std::uint8_t> hidden) {
    if (static_cast<int>(hidden.size()) != rbm.hidden()) {
        throw Error(ErrorCode::DimensionMismatch, "hidden configuration has the wrong length");
    }
    const Eigen::VectorXd act = rbm.visible_bias + rbm.weights * as_vector(hidden);
    return act.unaryExpr([](double x) { return logistic(x); });
}

std::vector<std::uint8_t> sample_hidden(const RbmParameters& rbm, std::span<const std::uint8_t> config,
                                        Rng& rng) {
    const Eigen::VectorXd p = hidden_activation(rbm, config);
    std::vector<std::uint8_t> h(static_cast<std::size_t>(p.size()));
    for (Eigen::Index j = 0; j < p.size(); ++j) h[static_cast<std::size_t>(j)] = uniform01(rng) < p[j] ? 1 : 0;
    return h;
}

SpinConfiguration sample_visible(const RbmParameters& rbm, std::span<const std::uint8_t> hidden, Rng& rng) {
    const Eigen::VectorXd p = visible_activation(rbm, hidden);
    SpinConfiguration v(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) v[static_cast<std::size_t>(i)] = uniform01(rng) < p[i] ? 1 : 0;
    return v;
}

std::vector<SpinConfiguration> cd_k(const RbmParameters& rbm, std::span<const SpinConfiguration> seeds,
                                    int k, Rng& rng) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    if (seeds.empty()) return {};
    const int n = rbm.visible();
    const int nh = rbm.hidden();
    const auto chains = static_cast<Eigen::Index>(seeds.size());
    Eigen::MatrixXd v(chains, n);
    for (Eigen::Index b = 0; b < chains; ++b) {
        const auto& s = seeds[static_cast<std::size_t>(b)];
        check_visible(rbm, s.size());
        for (int i = 0; i < n; ++i) v(b, i) = s[static_cast<std::size_t>(i)];
    }

    const std::uint64_t key = rng();
    const auto units = static_cast<std::uint64_t>(n + nh);
    Eigen::MatrixXd h(chains, nh);
    for (int step = 0; step < k; ++step) {
        const std::uint64_t base = static_cast<std::uint64_t>(step) * units;
        Eigen::MatrixXd act = v * rbm.weights;
        act.rowwise() += rbm.hidden_bias.transpose();
        const Eigen::ArrayXXd ph = act.array().logistic();
        for (Eigen::Index b = 0; b < chains; ++b) {
            for (int j = 0; j < nh; ++j) {
                const double u = counter_uniform(key, static_cast<std::uint64_t>(b), base + static_cast<std::uint64_t>(j));
                h(b, j) = u < ph(b, j) ? 1.0 : 0.0;
            }
        }
        act = h * rbm.weights.transpose();
        act.rowwise() += rbm.visible_bias.transpose();
        const Eigen::ArrayXXd pv = act.array().logistic();
        for (Eigen::Index b = 0; b < chains; ++b) {
            for (int i = 0; i < n; ++i) {
                const double u = counter_uniform(key, static_cast<std::uint64_t>(b),
                                                 base + static_cast<std::uint64_t>(nh + i));
                v(b, i) = u < pv(b, i) ? 1.0 : 0.0;
            }
        }
    }

    std::vector<SpinConfiguration> out(seeds.size(), SpinConfiguration(static_cast<std::size_t>(n)));
    for (Eigen::Index b = 0; b < chains; ++b) {
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] = v(b, i) > 0.5 ? 1 : 0;
    }
    return out;
}

RbmGradient mean_energy_gradient(const RbmParameters& rbm, std::span<const SpinConfiguration> configs,
                                 std::span<const double> weights) {
    if (configs.empty()) throw Error(ErrorCode::InvalidArgument, "gradient phase needs samples");
    if (!weights.empty() && weights.size() != configs.size()) {
        throw Error(ErrorCode::DimensionMismatch, "weights do not match configurations");
    }
    RbmGradient g = RbmParameters::zeros(rbm.visible(), rbm.hidden());
    const double uniform = 1.0 / static_cast<double>(configs.size());
    for (std::size_t s = 0; s < configs.size(); ++s) {
        const double w = weights.empty() ? uniform : weights[s];
        if (w == 0.0) continue;
        const Eigen::VectorXd v = as_vector(configs[s]);
        check_visible(rbm, configs[s].size());
        const Eigen::VectorXd ph = hidden_activation(rbm, configs[s]);
        g.weights.noalias() -= w * v * ph.transpose();
        g.hidden_bias -= w * ph;
        g.visible_bias -= w * v;
    }
    return g;
}

RbmGradient kl_gradient(const RbmParameters& rbm, std::span<const SpinConfiguration> data,
                        std::span<const SpinConfiguration> model_samples) {
    RbmGradient g = mean_energy_gradient(rbm, data);
    g.axpy(-1.0, mean_energy_gradient(rbm, model_samples));
    return g;
}

double exact_log_partition(const RbmParameters& rbm) { return log_sum_exp_neg(all_energies(rbm)); }

double exact_partition(const RbmParameters& rbm) { return std::exp(exact_log_partition(rbm)); }

Eigen::VectorXd exact_distribution(const RbmParameters& rbm) {
    const Eigen::VectorXd energies = all_energies(rbm);
    const double log_z = log_sum_exp_neg(energies);
    return (-energies.array() - log_z).exp().matrix();
}

double exact_kl(const RbmParameters& rbm, const GroundState& gs) {
    if (gs.spec.n != rbm.visible()) throw Error(ErrorCode::DimensionMismatch, "RBM and ground state sizes differ");
    const Eigen::VectorXd energies = all_energies(rbm);
    const double log_z = log_sum_exp_neg(energies);
    const Eigen::VectorXd q = gs.probabilities();
    double kl = 0.0;
    for (std::size_t s = 0; s < gs.basis.size(); ++s) {
        const double qs = q[static_cast<Eigen::Index>(s)];
        if (qs == 0.0) continue;
        const double log_p = -energies[static_cast<Eigen::Index>(gs.basis.code(s))] - log_z;
        kl += qs * (std::log(qs) - log_p);
    }
    return kl;
}

RbmGradient exact_kl_gradient(const RbmParameters& rbm, const GroundState& gs) {
    if (gs.spec.n != rbm.visible()) throw Error(ErrorCode::DimensionMismatch, "RBM and ground state sizes differ");
    const Eigen::VectorXd q = gs.probabilities();
    std::vector<SpinConfiguration> sector(gs.basis.size());
    for (std::size_t s = 0; s < sector.size(); ++s) sector[s] = gs.basis.state(s);
    RbmGradient g = mean_energy_gradient(rbm, sector, std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));

    const Eigen::VectorXd p = exact_distribution(rbm);
    const int n = rbm.visible();
    std::vector<SpinConfiguration> all(static_cast<std::size_t>(p.size()));
    for (std::size_t code = 0; code < all.size(); ++code) all[code] = unpack(code, n);
    g.axpy(-1.0, mean_energy_gradient(rbm, all, std::span<const double>(p.data(), static_cast<std::size_t>(p.size()))));
    return g;
}

double rbm_amplitude(const RbmParameters& rbm, std::span<const std::uint8_t> config) {
    return std::exp(-0.5 * effective_energy(rbm, config));
}

std::vector<SpinConfiguration> sample_exact(const RbmParameters& rbm, std::size_t count, Rng& rng) {
    const Eigen::VectorXd p = exact_distribution(rbm);
    std::vector<double> cdf(static_cast<std::size_t>(p.size()));
    double running = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) cdf[static_cast<std::size_t>(i)] = (running += p[i]);
    std::vector<SpinConfiguration> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), uniform01(rng) * running);
        if (it == cdf.end()) --it;
        out.push_back(unpack(static_cast<std::uint64_t>(it - cdf.begin()), rbm.visible()));
    }
    return out;
}

}  // namespace qsr
