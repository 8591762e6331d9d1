// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file observables.hpp
 * @brief Variational energy estimator and sector diagnostics.
 *
 * E_loc(sigma) = sum over antiparallel bonds (i, i+1) of
 * (-J/2) psi(sigma^(i<->i+1)) / psi(sigma); all other matrix elements of H
 * vanish in the S^z basis.
 */

#pragma once

#include <qsr/spins.hpp>
#include <qsr/xy_chain.hpp>

#include <functional>
#include <span>
#include <vector>

namespace qsr {

struct EnergyEstimate {
    double mean = 0.0;
    double standard_error = 0.0;  ///< sample std (n - 1 normalization) / sqrt(n); 0 for n = 1
    std::size_t n_samples = 0;
};

/// Evaluates ln psi for a batch of configurations; -inf marks psi = 0.
using LogAmplitudeBatchFn = std::function<std::vector<double>(std::span<const SpinConfiguration>)>;

/// Throws ZeroAmplitudeConfig if amplitude_fn(config) is not positive.
double local_energy(const AmplitudeFn& amplitude_fn, std::span<const std::uint8_t> config,
                    const XYChainSpec& spec);

/// Local energies of every sample, computed from a batched log-amplitude.
/// Each distinct configuration and each exchange neighbour is evaluated once.
std::vector<double> local_energies(const LogAmplitudeBatchFn& log_amplitude,
                                   std::span<const SpinConfiguration> samples, const XYChainSpec& spec);

/// Mean and standard error of a list of values.
EnergyEstimate summarize(std::span<const double> values);

EnergyEstimate energy_estimate(const AmplitudeFn& amplitude_fn, std::span<const SpinConfiguration> samples,
                               const XYChainSpec& spec);
EnergyEstimate energy_estimate(const LogAmplitudeBatchFn& log_amplitude,
                               std::span<const SpinConfiguration> samples, const XYChainSpec& spec);

/// |e_model - e_exact| / N.
double energy_difference(double e_model, double e_exact, int n);

/// Fraction of samples outside the zero-magnetization sector.
double sector_fraction(std::span<const SpinConfiguration> samples);

}  // namespace qsr
