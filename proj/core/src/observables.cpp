// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/observables.hpp>

#include <cmath>
#include <string>
#include <unordered_map>

namespace qsr {

namespace {

[[noreturn]] void zero_amplitude(std::span<const std::uint8_t> config) {
    throw Error(ErrorCode::ZeroAmplitudeConfig,
                "sampled configuration [" + to_line(config) + "] has zero amplitude");
}

}  // namespace

double local_energy(const AmplitudeFn& amplitude_fn, std::span<const std::uint8_t> config,
                    const XYChainSpec& spec) {
    const SpinConfiguration s(config.begin(), config.end());
    const double psi = amplitude_fn(s);
    if (!(psi > 0.0)) zero_amplitude(config);
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == s[i + 1]) continue;
        e += -0.5 * spec.j * amplitude_fn(qsr::exchange(s, static_cast<int>(i))) / psi;
    }
    return e;
}

std::vector<double> local_energies(const LogAmplitudeBatchFn& log_amplitude,
                                   std::span<const SpinConfiguration> samples, const XYChainSpec& spec) {
    // Distinct configurations in first-seen order, so the batch is deterministic.
    std::unordered_map<std::uint64_t, std::size_t> slot;
    std::vector<SpinConfiguration> unique;
    const auto visit = [&](const SpinConfiguration& c) {
        const auto [it, inserted] = slot.try_emplace(pack(c), unique.size());
        if (inserted) unique.push_back(c);
        return it->second;
    };
    for (const auto& s : samples) {
        visit(s);
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            if (s[i] != s[i + 1]) visit(qsr::exchange(s, static_cast<int>(i)));
        }
    }
    const std::vector<double> log_psi = unique.empty() ? std::vector<double>{} : log_amplitude(unique);
    if (log_psi.size() != unique.size()) {
        throw Error(ErrorCode::DimensionMismatch, "log-amplitude batch returned the wrong length");
    }

    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        const double base = log_psi[slot.at(pack(s))];
        if (!std::isfinite(base)) zero_amplitude(s);
        double e = 0.0;
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            if (s[i] == s[i + 1]) continue;
            const double other = log_psi[slot.at(pack(qsr::exchange(s, static_cast<int>(i))))];
            e += -0.5 * spec.j * std::exp(other - base);
        }
        out.push_back(e);
    }
    return out;
}

EnergyEstimate summarize(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no samples to summarize");
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    const double std_error = values.size() > 1 ? std::sqrt(sq / (n - 1.0)) / std::sqrt(n) : 0.0;
    return {mean, std_error, values.size()};
}

EnergyEstimate energy_estimate(const AmplitudeFn& amplitude_fn, std::span<const SpinConfiguration> samples,
                               const XYChainSpec& spec) {
    std::vector<double> e;
    e.reserve(samples.size());
    for (const auto& s : samples) e.push_back(local_energy(amplitude_fn, s, spec));
    return summarize(e);
}

EnergyEstimate energy_estimate(const LogAmplitudeBatchFn& log_amplitude,
                               std::span<const SpinConfiguration> samples, const XYChainSpec& spec) {
    return summarize(local_energies(log_amplitude, samples, spec));
}

double energy_difference(double e_model, double e_exact, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
    return std::abs(e_model - e_exact) / n;
}

double sector_fraction(std::span<const SpinConfiguration> samples) {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
    std::size_t outside = 0;
    for (const auto& s : samples) outside += in_zero_sector(s) ? 0 : 1;
    return static_cast<double>(outside) / static_cast<double>(samples.size());
}

}  // namespace qsr
