// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

// Microbenchmarks for the hot loops: sector Hamiltonian products, the
// recurrent forward/backward pass, autoregressive sampling and Gibbs chains.
//
//   qsr_bench --benchmark_filter=Rnn

#include <qsr/rbm.hpp>
#include <qsr/rnn.hpp>
#include <qsr/training.hpp>
#include <qsr/xy_chain.hpp>

#include <benchmark/benchmark.h>

#include <vector>

using namespace qsr;

namespace {

std::vector<SpinConfiguration> sector_batch(int n, int count, Rng& rng) {
    SectorBasis basis(n);
    std::vector<SpinConfiguration> out;
    for (int b = 0; b < count; ++b) out.push_back(basis.state(rng() % basis.size()));
    return out;
}

void BM_HamiltonianApply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const XYChainSpec spec{n, 1.0};
    const SectorBasis basis(n);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(basis.size()));
    for (auto _ : state) {
        v = hamiltonian_apply(spec, basis, v).normalized();
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(basis.size()));
}
BENCHMARK(BM_HamiltonianApply)->Arg(10)->Arg(14)->Arg(18);

void BM_GroundState(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ground_state({n, 1.0}).energy);
}
BENCHMARK(BM_GroundState)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

// One training step: teacher-forced pass plus BPTT on a batch of 50.
void BM_RnnGradient(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int hidden = static_cast<int>(state.range(1));
    Rng rng(1);
    const auto params = RnnParameters::initialized(CellKind::Gru, hidden, rng);
    const auto batch = sector_batch(n, 50, rng);
    for (auto _ : state) benchmark::DoNotOptimize(nll_gradient(params, batch, SymmetryMode::U1));
    state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_RnnGradient)->Args({10, 32})->Args({10, 100})->Args({20, 100})->Unit(benchmark::kMicrosecond);

void BM_RnnLogProb(benchmark::State& state) {
    const int hidden = static_cast<int>(state.range(0));
    Rng rng(2);
    const auto params = RnnParameters::initialized(CellKind::Gru, hidden, rng);
    const auto batch = sector_batch(10, 1000, rng);
    for (auto _ : state) benchmark::DoNotOptimize(log_prob_batch(params, batch, SymmetryMode::U1));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_RnnLogProb)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_RnnSample(benchmark::State& state) {
    const auto mode = state.range(0) ? SymmetryMode::U1 : SymmetryMode::None;
    Rng rng(3);
    const auto params = RnnParameters::initialized(CellKind::Gru, 32, rng);
    for (auto _ : state) benchmark::DoNotOptimize(sample(params, 10, 1000, mode, rng));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_RnnSample)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// One negative phase: 200 chains, k sweeps.
void BM_CdK(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    Rng rng(4);
    const auto rbm = RbmParameters::initialized(10, 100, rng);
    std::vector<SpinConfiguration> seeds;
    for (int b = 0; b < 200; ++b) {
        SpinConfiguration s(10);
        for (auto& x : s) x = static_cast<std::uint8_t>(rng() & 1u);
        seeds.push_back(s);
    }
    for (auto _ : state) benchmark::DoNotOptimize(cd_k(rbm, seeds, k, rng));
    state.SetItemsProcessed(state.iterations() * 200 * k);
}
BENCHMARK(BM_CdK)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
