// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file rbm.hpp
 * @brief Binary restricted Boltzmann machine baseline.
 *
 * Joint energy E(sigma, h) = -sigma^T W h - sigma^T b - h^T c with hidden
 * units summed out analytically:
 *   E_eff(sigma) = -sigma^T b - sum_j softplus(c_j + sum_i W_ij sigma_i).
 * p(sigma) = exp(-E_eff(sigma)) / Z and psi(sigma) = sqrt(p(sigma)).
 */

#pragma once

#include <qsr/random.hpp>
#include <qsr/spins.hpp>
#include <qsr/xy_chain.hpp>

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace qsr {

struct RbmParameters {
    Eigen::MatrixXd weights;       ///< W, N x n_h
    Eigen::VectorXd visible_bias;  ///< b, length N
    Eigen::VectorXd hidden_bias;   ///< c, length n_h

    static RbmParameters zeros(int visible, int hidden);
    /// W ~ N(0, 1) / sqrt(N), biases zero.
    static RbmParameters initialized(int visible, int hidden, Rng& rng);

    [[nodiscard]] int visible() const noexcept { return static_cast<int>(visible_bias.size()); }
    [[nodiscard]] int hidden() const noexcept { return static_cast<int>(hidden_bias.size()); }

    /// Throws DimensionMismatch on inconsistent shapes.
    void validate() const;

    /// this += scale * other.
    void axpy(double scale, const RbmParameters& other);
};

/// Gradients share the parameter layout.
using RbmGradient = RbmParameters;

/// Largest visible layer for the exact partition-function oracles.
inline constexpr int kMaxRbmEnumerationSites = 20;

double effective_energy(const RbmParameters& rbm, std::span<const std::uint8_t> config);

/// p(h_j = 1 | sigma) = logistic(c_j + sum_i W_ij sigma_i).
Eigen::VectorXd hidden_activation(const RbmParameters& rbm, std::span<const std::uint8_t> config);
/// p(sigma_i = 1 | h) = logistic(b_i + sum_j W_ij h_j).
Eigen::VectorXd visible_activation(const RbmParameters& rbm, std::span<const std::uint8_t> hidden);

std::vector<std::uint8_t> sample_hidden(const RbmParameters& rbm, std::span<const std::uint8_t> config,
                                        Rng& rng);
SpinConfiguration sample_visible(const RbmParameters& rbm, std::span<const std::uint8_t> hidden, Rng& rng);

/// k block-Gibbs sweeps (hidden then visible) from every seed configuration.
/// Chains draw from counter-based streams keyed by chain index, so the
/// result does not depend on chain scheduling.
std::vector<SpinConfiguration> cd_k(const RbmParameters& rbm, std::span<const SpinConfiguration> seeds,
                                    int k, Rng& rng);

/// Weighted mean of grad E_eff over configurations; uniform weights when
/// `weights` is empty.
RbmGradient mean_energy_gradient(const RbmParameters& rbm, std::span<const SpinConfiguration> configs,
                                 std::span<const double> weights = {});

/// <grad E>_data - <grad E>_model (positive minus negative phase).
RbmGradient kl_gradient(const RbmParameters& rbm, std::span<const SpinConfiguration> data,
                        std::span<const SpinConfiguration> model_samples);

/// ln Z over all 2^N visible configurations (N <= 20).
double exact_log_partition(const RbmParameters& rbm);
/// Z = exp(ln Z); may overflow to inf for large parameters.
double exact_partition(const RbmParameters& rbm);

/// Normalized p(sigma) for every code 0..2^N-1 (sigma_1 most significant).
Eigen::VectorXd exact_distribution(const RbmParameters& rbm);

/// KL(q || p) with q the ground-state distribution zero-padded outside the
/// sector; 0 ln 0 = 0.
double exact_kl(const RbmParameters& rbm, const GroundState& gs);

/// Exact gradient of exact_kl: q-weighted positive phase minus p-weighted
/// negative phase.
RbmGradient exact_kl_gradient(const RbmParameters& rbm, const GroundState& gs);

/// Unnormalized exp(-E_eff / 2).
double rbm_amplitude(const RbmParameters& rbm, std::span<const std::uint8_t> config);

/// Independent samples from the exact distribution (N <= 20).
std::vector<SpinConfiguration> sample_exact(const RbmParameters& rbm, std::size_t count, Rng& rng);

}  // namespace qsr
