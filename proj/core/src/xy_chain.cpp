// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/xy_chain.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qsr {

void XYChainSpec::validate() const {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "N must be at least 2, got " + std::to_string(n));
    if (n % 2 != 0) throw Error(ErrorCode::OddN, "N must be even, got " + std::to_string(n));
    if (!(j > 0.0) || !std::isfinite(j)) {
        throw Error(ErrorCode::InvalidArgument, "J must be positive and finite");
    }
}

// ---------------------------------------------------------------------------
// Sector basis
// ---------------------------------------------------------------------------

SectorBasis::SectorBasis(int n) : n_(n) {
    if (n % 2 != 0) throw Error(ErrorCode::OddN, "sector basis needs even N, got " + std::to_string(n));
    if (n < 2 || n > kMaxBasisSites) {
        throw Error(ErrorCode::SizeLimitExceeded,
                    "sector basis supports 2 <= N <= 24, got " + std::to_string(n));
    }
    const std::uint32_t limit = 1u << n;
    std::uint32_t v = (1u << (n / 2)) - 1u;
    // Gosper's hack: next larger integer with the same popcount.
    while (v < limit) {
        codes_.push_back(v);
        const std::uint32_t c = v & (~v + 1u);
        const std::uint32_t r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
}

SpinConfiguration SectorBasis::state(std::size_t index) const { return unpack(code(index), n_); }

std::optional<std::size_t> SectorBasis::index_of(std::uint32_t code) const noexcept {
    auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
    if (it == codes_.end() || *it != code) return std::nullopt;
    return static_cast<std::size_t>(it - codes_.begin());
}

std::optional<std::size_t> SectorBasis::index_of(std::span<const std::uint8_t> config) const {
    if (static_cast<int>(config.size()) != n_) return std::nullopt;
    return index_of(static_cast<std::uint32_t>(pack(config)));
}

// ---------------------------------------------------------------------------
// Hamiltonian
// ---------------------------------------------------------------------------

namespace {

/// Calls fn(target_index) for every state reached from `code` by one
/// antiparallel-bond exchange.
template <typename Fn>
void for_each_exchange(const SectorBasis& basis, std::uint32_t code, Fn&& fn) {
    const int n = basis.sites();
    for (int i = 0; i + 1 < n; ++i) {
        const std::uint32_t mask = 3u << (n - 2 - i);
        const std::uint32_t pair = code & mask;
        if (pair == 0 || pair == mask) continue;
        const auto target = basis.index_of(code ^ mask);
        fn(*target);
    }
}

}  // namespace

Eigen::VectorXd hamiltonian_apply(const XYChainSpec& spec, const SectorBasis& basis,
                                  const Eigen::VectorXd& v) {
    if (static_cast<std::size_t>(v.size()) != basis.size()) {
        throw Error(ErrorCode::DimensionMismatch, "vector length " + std::to_string(v.size()) +
                                                      " != sector size " + std::to_string(basis.size()));
    }
    const double element = -0.5 * spec.j;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    const auto codes = basis.codes();
    for (std::size_t s = 0; s < codes.size(); ++s) {
        const double vs = v[static_cast<Eigen::Index>(s)];
        for_each_exchange(basis, codes[s], [&](std::size_t t) {
            out[static_cast<Eigen::Index>(t)] += element * vs;
        });
    }
    return out;
}

Eigen::MatrixXd hamiltonian_matrix(const XYChainSpec& spec, const SectorBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const auto codes = basis.codes();
    for (std::size_t s = 0; s < codes.size(); ++s) {
        for_each_exchange(basis, codes[s], [&](std::size_t t) {
            h(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) += -0.5 * spec.j;
        });
    }
    return h;
}

// ---------------------------------------------------------------------------
// Ground state
// ---------------------------------------------------------------------------

namespace {

struct LowestPair {
    double e0;
    double e1;
    Eigen::VectorXd vec;
};

LowestPair dense_lowest(const XYChainSpec& spec, const SectorBasis& basis) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian_matrix(spec, basis));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "dense eigensolver failed");
    }
    const auto& evals = solver.eigenvalues();
    const double e1 = evals.size() > 1 ? evals[1] : std::numeric_limits<double>::infinity();
    return {evals[0], e1, solver.eigenvectors().col(0)};
}

// Lanczos with full reorthogonalization. The start vector is strictly
// positive so it overlaps the Perron-Frobenius ground state, and random so
// it also overlaps the first excited state used for the gap check.
LowestPair lanczos_lowest(const XYChainSpec& spec, const SectorBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.size());
    const int max_krylov = static_cast<int>(std::min<Eigen::Index>(dim, 300));
    const double tol = 1e-12;

    Rng rng(derive_seed(0x5eed, "lanczos.start"));
    Eigen::VectorXd q(dim);
    for (Eigen::Index i = 0; i < dim; ++i) q[i] = 0.5 + uniform01(rng);
    q.normalize();

    std::vector<Eigen::VectorXd> krylov;
    std::vector<double> alpha;
    std::vector<double> beta;
    krylov.reserve(static_cast<std::size_t>(max_krylov));

    Eigen::VectorXd ritz0;
    double e0 = 0.0;
    double e1 = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (int k = 0; k < max_krylov; ++k) {
        krylov.push_back(q);
        Eigen::VectorXd w = hamiltonian_apply(spec, basis, q);
        const double a = q.dot(w);
        alpha.push_back(a);
        w -= a * q;
        if (k > 0) w -= beta.back() * krylov[static_cast<std::size_t>(k) - 1];
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& qj : krylov) w -= qj.dot(w) * qj;
        }
        const double b = w.norm();

        const int m = k + 1;
        const bool exhausted = b < 1e-13 || m == max_krylov;
        if (m >= 2 && (m % 5 == 0 || exhausted)) {
            Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
            Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, sub);
            const auto& y = tri.eigenvectors();
            const double r0 = std::abs(b * y(m - 1, 0));
            const double r1 = std::abs(b * y(m - 1, 1));
            e0 = tri.eigenvalues()[0];
            e1 = tri.eigenvalues()[1];
            if ((r0 < tol * std::max(1.0, std::abs(e0)) && r1 < 1e-6) || exhausted) {
                ritz0 = Eigen::VectorXd::Zero(dim);
                for (int j = 0; j < m; ++j) ritz0 += y(j, 0) * krylov[static_cast<std::size_t>(j)];
                converged = r0 < 1e-9 * std::max(1.0, std::abs(e0));
                break;
            }
        }
        beta.push_back(b);
        q = w / b;
    }
    if (!converged) throw Error(ErrorCode::ConvergenceFailure, "Lanczos did not converge");
    return {e0, e1, ritz0};
}

// Flip to the nonnegative Perron-Frobenius representative.
Eigen::VectorXd fix_gauge(Eigen::VectorXd v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    v.normalize();
    if (v.minCoeff() < -1e-12) {
        throw Error(ErrorCode::ConvergenceFailure, "ground state is not sign-free");
    }
    v = v.cwiseMax(0.0);
    v.normalize();
    return v;
}

}  // namespace

GroundState ground_state(const XYChainSpec& spec, EigenMethod method) {
    spec.validate();
    if (spec.n > kMaxExactSites) {
        throw Error(ErrorCode::SizeLimitExceeded,
                    "exact ground state supports N <= 20, got " + std::to_string(spec.n));
    }
    SectorBasis basis(spec.n);
    if (method == EigenMethod::Automatic) {
        method = basis.size() <= kDenseSectorLimit ? EigenMethod::Dense : EigenMethod::Lanczos;
    }
    const LowestPair lowest = method == EigenMethod::Dense ? dense_lowest(spec, basis)
                                                           : lanczos_lowest(spec, basis);
    const double gap = lowest.e1 - lowest.e0;
    if (!(gap > 1e-8)) {
        throw Error(ErrorCode::ConvergenceFailure,
                    "lowest sector level is not separated (gap " + std::to_string(gap) + ")");
    }
    Eigen::VectorXd amplitudes = fix_gauge(lowest.vec);
    const Eigen::VectorXd hpsi = hamiltonian_apply(spec, basis, amplitudes);
    const double energy = amplitudes.dot(hpsi);
    if ((hpsi - energy * amplitudes).norm() > 1e-8 * std::max(1.0, std::abs(energy))) {
        throw Error(ErrorCode::ConvergenceFailure, "ground-state residual too large");
    }
    return GroundState{spec, std::move(basis), std::move(amplitudes), energy, gap};
}

GroundState ground_state_from_amplitudes(const XYChainSpec& spec, Eigen::VectorXd amplitudes,
                                         double energy) {
    spec.validate();
    SectorBasis basis(spec.n);
    if (static_cast<std::size_t>(amplitudes.size()) != basis.size()) {
        throw Error(ErrorCode::DimensionMismatch, "amplitude count does not match the sector size");
    }
    if (amplitudes.minCoeff() < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "cached amplitudes must be nonnegative");
    }
    if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-10) {
        throw Error(ErrorCode::InvalidArgument, "cached amplitudes are not normalized");
    }
    const double recomputed = amplitudes.dot(hamiltonian_apply(spec, basis, amplitudes));
    if (std::abs(recomputed - energy) > 1e-8 * std::max(1.0, std::abs(energy))) {
        throw Error(ErrorCode::InvalidArgument, "cached energy disagrees with the amplitudes");
    }
    return GroundState{spec, std::move(basis), std::move(amplitudes), recomputed, 0.0};
}

Eigen::VectorXd GroundState::probabilities() const { return amplitudes.array().square(); }

double GroundState::amplitude(std::span<const std::uint8_t> config) const {
    const auto index = basis.index_of(config);
    return index ? amplitudes[static_cast<Eigen::Index>(*index)] : 0.0;
}

double free_fermion_energy(int n, double j) {
    double energy = 0.0;
    for (int m = 1; m <= n; ++m) {
        const double c = std::cos(std::numbers::pi * m / (n + 1));
        if (c > 0.0) energy -= j * c;
    }
    return energy;
}

// ---------------------------------------------------------------------------
// Data and overlaps
// ---------------------------------------------------------------------------

void Dataset::validate() const {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "dataset is empty");
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& sample = samples[s];
        if (static_cast<int>(sample.size()) != n) {
            throw Error(ErrorCode::DimensionMismatch, "sample " + std::to_string(s) + " has length " +
                                                          std::to_string(sample.size()) + ", expected " +
                                                          std::to_string(n));
        }
        for (std::uint8_t v : sample) {
            if (v > 1) throw Error(ErrorCode::InvalidArgument, "sample entries must be 0 or 1");
        }
    }
}

Dataset sample_dataset(const GroundState& gs, std::size_t count, Rng& rng) {
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    const Eigen::VectorXd q = gs.probabilities();
    std::vector<double> cdf(static_cast<std::size_t>(q.size()));
    double running = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        running += q[i];
        cdf[static_cast<std::size_t>(i)] = running;
    }
    Dataset data;
    data.n = gs.spec.n;
    data.samples.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        const double u = uniform01(rng) * running;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        data.samples.push_back(gs.basis.state(static_cast<std::size_t>(it - cdf.begin())));
    }
    return data;
}

double fidelity(const GroundState& gs, std::span<const double> model_amplitudes) {
    if (model_amplitudes.size() != gs.basis.size()) {
        throw Error(ErrorCode::DimensionMismatch, "model amplitudes do not cover the sector basis");
    }
    double overlap = 0.0;
    for (std::size_t i = 0; i < model_amplitudes.size(); ++i) {
        overlap += gs.amplitudes[static_cast<Eigen::Index>(i)] * model_amplitudes[i];
    }
    return overlap * overlap;
}

double fidelity(const GroundState& gs, const AmplitudeFn& model_amplitude) {
    if (gs.spec.n > kMaxExactSites) {
        throw Error(ErrorCode::SizeLimitExceeded, "fidelity needs N <= 20");
    }
    std::vector<double> values(gs.basis.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = model_amplitude(gs.basis.state(i));
    return fidelity(gs, values);
}

double exact_model_energy(const XYChainSpec& spec, const AmplitudeFn& model_amplitude) {
    spec.validate();
    if (spec.n > kMaxEnumerationSites) {
        throw Error(ErrorCode::SizeLimitExceeded, "full enumeration needs N <= 12");
    }
    const int n = spec.n;
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> psi(dim);
    for (std::size_t code = 0; code < dim; ++code) psi[code] = model_amplitude(unpack(code, n));

    double numerator = 0.0;
    double norm = 0.0;
    for (std::size_t code = 0; code < dim; ++code) {
        norm += psi[code] * psi[code];
        if (psi[code] == 0.0) continue;
        double h_psi = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            const std::size_t mask = std::size_t{3} << (n - 2 - i);
            const std::size_t pair = code & mask;
            if (pair == 0 || pair == mask) continue;
            h_psi += -0.5 * spec.j * psi[code ^ mask];
        }
        numerator += psi[code] * h_psi;
    }
    if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "model state has zero norm");
    return numerator / norm;
}

}  // namespace qsr
