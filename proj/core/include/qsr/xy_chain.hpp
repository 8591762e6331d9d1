// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file xy_chain.hpp
 * @brief Exact solver for the open spin-1/2 XY chain
 *        H = -J sum_<ij> (S^x_i S^x_j + S^y_i S^y_j).
 *
 * Everything here works inside the zero-magnetization sector (N/2 down
 * spins). States are indexed by their packed code with sigma_1 as the most
 * significant bit, so basis order is lexicographic.
 */

#pragma once

#include <qsr/random.hpp>
#include <qsr/spins.hpp>

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qsr {

/// Largest chain whose sector basis may be enumerated.
inline constexpr int kMaxBasisSites = 24;
/// Largest chain for ground states, fidelities and dataset generation.
inline constexpr int kMaxExactSites = 20;
/// Largest chain for full 2^N enumeration oracles.
inline constexpr int kMaxEnumerationSites = 12;
/// Sector dimension up to which the dense eigensolver is used.
inline constexpr std::size_t kDenseSectorLimit = 4000;

/// Function returning a real amplitude psi(sigma) for a configuration.
using AmplitudeFn = std::function<double(const SpinConfiguration&)>;

struct XYChainSpec {
    int n = 2;
    double j = 1.0;

    /// Throws OddN / InvalidArgument unless N >= 2, N even and J > 0.
    void validate() const;
};

class SectorBasis {
public:
    /// Enumerates all N-bit strings with N/2 ones in increasing order.
    /// Throws OddN for odd N and SizeLimitExceeded outside 2 <= N <= 24.
    explicit SectorBasis(int n);

    [[nodiscard]] int sites() const noexcept { return n_; }
    [[nodiscard]] std::size_t size() const noexcept { return codes_.size(); }
    [[nodiscard]] std::span<const std::uint32_t> codes() const noexcept { return codes_; }
    [[nodiscard]] std::uint32_t code(std::size_t index) const { return codes_.at(index); }
    [[nodiscard]] SpinConfiguration state(std::size_t index) const;

    [[nodiscard]] std::optional<std::size_t> index_of(std::uint32_t code) const noexcept;
    [[nodiscard]] std::optional<std::size_t> index_of(std::span<const std::uint8_t> config) const;

private:
    int n_;
    std::vector<std::uint32_t> codes_;
};

inline SectorBasis build_sector_basis(int n) { return SectorBasis(n); }

/// H v inside the sector. Only antiparallel nearest-neighbour pairs couple,
/// each with matrix element -J/2; the diagonal is zero.
Eigen::VectorXd hamiltonian_apply(const XYChainSpec& spec, const SectorBasis& basis,
                                  const Eigen::VectorXd& v);

/// Dense sector Hamiltonian (small sectors only).
Eigen::MatrixXd hamiltonian_matrix(const XYChainSpec& spec, const SectorBasis& basis);

struct GroundState {
    XYChainSpec spec;
    SectorBasis basis;
    Eigen::VectorXd amplitudes;  ///< psi_GS(sigma) >= 0, unit norm
    double energy = 0.0;         ///< <psi|H|psi>
    double gap = 0.0;            ///< second-lowest minus lowest sector eigenvalue

    /// q(sigma) = psi_GS(sigma)^2 over the basis.
    [[nodiscard]] Eigen::VectorXd probabilities() const;
    /// psi_GS(sigma); zero outside the sector.
    [[nodiscard]] double amplitude(std::span<const std::uint8_t> config) const;
};

enum class EigenMethod { Automatic, Dense, Lanczos };

/// Lowest sector eigenpair in the nonnegative gauge. Automatic picks dense
/// diagonalization up to kDenseSectorLimit states and Lanczos above that.
/// Throws SizeLimitExceeded for N > 20 and ConvergenceFailure if the solver
/// does not converge or the lowest level is not separated by more than 1e-8.
GroundState ground_state(const XYChainSpec& spec, EigenMethod method = EigenMethod::Automatic);

/// Rebuilds a ground state from cached amplitudes (e.g. a cache file).
/// Checks normalization and nonnegativity; recomputes energy and checks it
/// against `energy` within 1e-8.
GroundState ground_state_from_amplitudes(const XYChainSpec& spec, Eigen::VectorXd amplitudes,
                                         double energy);

/// Open-chain free-fermion ground energy at half filling:
/// sum over m with cos(pi m/(N+1)) > 0 of -J cos(pi m/(N+1)).
double free_fermion_energy(int n, double j);

struct Dataset {
    int n = 0;
    std::vector<SpinConfiguration> samples;
    /// 1-based source line of each sample when read from a file; may be empty.
    std::vector<std::size_t> source_lines;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
    /// Throws unless nonempty and every sample has length n with 0/1 entries.
    void validate() const;
};

/// M independent draws from q(sigma) by inverse CDF over the sector basis.
Dataset sample_dataset(const GroundState& gs, std::size_t count, Rng& rng);

/// (sum_sigma psi_GS(sigma) * model(sigma))^2 over the sector.
double fidelity(const GroundState& gs, const AmplitudeFn& model_amplitude);
/// Same, with model amplitudes already evaluated on gs.basis order.
double fidelity(const GroundState& gs, std::span<const double> model_amplitudes);

/// <psi|H|psi>/<psi|psi> by enumerating all 2^N states (N <= 12).
double exact_model_energy(const XYChainSpec& spec, const AmplitudeFn& model_amplitude);

}  // namespace qsr
