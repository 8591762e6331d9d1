// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "reference_rnn.hpp"
#include "support.hpp"

#include <qsr/error.hpp>
#include <qsr/training.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace qsr;

namespace {

RnnParameters random_params(CellKind cell, int hidden, Rng& rng, double scale = 0.6) {
    RnnParameters p = RnnParameters::initialized(cell, hidden, rng);
    auto& t = p.tensors();
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (auto& x : t[i].reshaped()) x = scale * (2.0 * uniform01(rng) - 1.0);
    }
    return p;
}

std::vector<SpinConfiguration> random_batch(int n, std::size_t size, SymmetryMode mode, Rng& rng) {
    std::vector<SpinConfiguration> batch;
    for (std::size_t k = 0; k < size; ++k) {
        batch.push_back(mode == SymmetryMode::U1 ? qsr::testing::random_sector_configuration(n, rng)
                                                 : qsr::testing::random_configuration(n, rng));
    }
    return batch;
}

Dataset small_dataset(int n, std::size_t count, std::uint64_t seed) {
    const auto gs = ground_state({n, 1.0});
    Rng rng(seed);
    return sample_dataset(gs, count, rng);
}

}  // namespace

TEST(Nll, Examples) {
    RnnParameters uniform(CellKind::Gru, 4);
    Rng rng(1);
    const auto batch = random_batch(10, 30, SymmetryMode::None, rng);
    EXPECT_NEAR(nll(uniform, batch, SymmetryMode::None), 10 * std::numbers::ln2, 1e-12);
    EXPECT_NEAR(nll(uniform, batch, SymmetryMode::None), 6.9315, 1e-4);

    RnnParameters certain(CellKind::Vanilla, 2);
    certain["c"](0, 0) = 100.0;
    certain["c"](1, 0) = -100.0;
    EXPECT_NEAR(nll(certain, std::vector<SpinConfiguration>{{0, 1}, {0, 1}}, SymmetryMode::U1), 0.0, 1e-12);

    RnnParameters hand(CellKind::Vanilla, 1);
    hand["W"](0, 0) = 0.8;
    hand["U"](0, 0) = -0.8 / std::tanh(0.8);
    hand["V"](0, 0) = std::log(3.0) / std::tanh(0.8);
    EXPECT_NEAR(nll(hand, std::vector<SpinConfiguration>{{0, 1}}, SymmetryMode::None), -std::log(0.375), 1e-14);
}

TEST(Nll, DependsOnlyOnTheMultiset) {
    Rng rng(2);
    const auto p = random_params(CellKind::Gru, 6, rng);
    auto batch = random_batch(8, 40, SymmetryMode::U1, rng);
    const double a = nll(p, batch, SymmetryMode::U1);
    std::reverse(batch.begin(), batch.end());
    EXPECT_EQ(nll(p, batch, SymmetryMode::U1), a);

    double direct = 0.0;
    for (const auto& s : batch) direct -= log_prob(p, s, SymmetryMode::U1);
    EXPECT_NEAR(a, direct / batch.size(), 1e-12);
}

TEST(Nll, SymmetryViolationNamesTheSample) {
    RnnParameters p(CellKind::Vanilla, 2);
    const std::vector<SpinConfiguration> batch{{0, 1, 1, 0}, {1, 0, 0, 1}, {1, 1, 1, 0}};
    try {
        nll(p, batch, SymmetryMode::U1);
        FAIL();
    } catch (const SymmetryViolation& e) {
        EXPECT_EQ(e.index(), 2u);
        EXPECT_EQ(e.code(), ErrorCode::SymmetryViolatedSample);
    }
    EXPECT_THROW(nll_gradient(p, batch, SymmetryMode::U1), SymmetryViolation);
    EXPECT_NO_THROW(nll(p, batch, SymmetryMode::None));
    EXPECT_THROW(nll(p, std::vector<SpinConfiguration>{}, SymmetryMode::None), Error);
}

TEST(Gradient, QuadReferenceAgreesWithTheLibrary) {
    Rng rng(31);
    for (CellKind cell : {CellKind::Vanilla, CellKind::Gru}) {
        for (SymmetryMode mode : {SymmetryMode::None, SymmetryMode::U1}) {
            const auto p = random_params(cell, 7, rng);
            const auto batch = random_batch(8, 10, mode, rng);
            const qsr::testing::QuadRnn reference(cell, 7, [&] {
                const Eigen::VectorXd f = p.tensors().flatten();
                return std::vector<qsr::testing::quad>(f.data(), f.data() + f.size());
            }());
            EXPECT_NEAR(static_cast<double>(reference.nll(batch, mode)), nll(p, batch, mode), 1e-12);
        }
    }
}

TEST(Gradient, MatchesFiniteDifferences) {
    for (CellKind cell : {CellKind::Vanilla, CellKind::Gru}) {
        for (SymmetryMode mode : {SymmetryMode::None, SymmetryMode::U1}) {
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                Rng rng(seed);
                const auto p = random_params(cell, 8, rng);
                const auto batch = random_batch(6, 12, mode, rng);
                const Eigen::VectorXd fd =
                    qsr::testing::quad_nll_gradient(cell, 8, p.tensors().flatten(), batch, mode);
                const Eigen::VectorXd bptt = nll_gradient(p, batch, mode).flatten();
                const double err = ((bptt - fd).array().abs() / (fd.array().abs() + 1e-8)).maxCoeff();
                EXPECT_LE(err, 1e-5) << to_string(cell) << " " << to_string(mode) << " seed " << seed;
            }
        }
    }
}

TEST(Gradient, LibraryFiniteDifferencesAreSecondOrderAccurate) {
    Rng rng(32);
    for (CellKind cell : {CellKind::Vanilla, CellKind::Gru}) {
        const auto p = random_params(cell, 6, rng);
        const auto batch = random_batch(6, 8, SymmetryMode::U1, rng);
        const Eigen::VectorXd exact =
            qsr::testing::quad_nll_gradient(cell, 6, p.tensors().flatten(), batch, SymmetryMode::U1);
        const Eigen::VectorXd fd = finite_diff_gradient(p, batch, SymmetryMode::U1, 1e-4).flatten();
        EXPECT_LT((fd - exact).cwiseAbs().maxCoeff(), 1e-7);
    }
}

TEST(Gradient, PropertyOverRandomShapes) {
    Rng rng(123);
    for (int trial = 0; trial < 12; ++trial) {
        const CellKind cell = trial % 2 ? CellKind::Gru : CellKind::Vanilla;
        const SymmetryMode mode = (trial / 2) % 2 ? SymmetryMode::U1 : SymmetryMode::None;
        const int n = 2 * (1 + static_cast<int>(rng() % 3));
        const int hidden = 1 + static_cast<int>(rng() % 16);
        const auto p = random_params(cell, hidden, rng);
        const auto batch = random_batch(n, 1 + rng() % 8, mode, rng);
        const Eigen::VectorXd fd = qsr::testing::quad_nll_gradient(cell, hidden, p.tensors().flatten(), batch, mode);
        const Eigen::VectorXd bptt = nll_gradient(p, batch, mode).flatten();
        EXPECT_LE(((bptt - fd).array().abs() / (fd.array().abs() + 1e-8)).maxCoeff(), 1e-5)
            << "trial " << trial << " n=" << n << " d_h=" << hidden;
    }
}

TEST(Gradient, SecondOrderConvergence) {
    Rng rng(9);
    const auto p = random_params(CellKind::Gru, 5, rng);
    const auto batch = random_batch(6, 8, SymmetryMode::None, rng);
    const Eigen::VectorXd exact = nll_gradient(p, batch, SymmetryMode::None).flatten();
    const double coarse =
        (finite_diff_gradient(p, batch, SymmetryMode::None, 1e-2).flatten() - exact).cwiseAbs().maxCoeff();
    const double fine =
        (finite_diff_gradient(p, batch, SymmetryMode::None, 1e-3).flatten() - exact).cwiseAbs().maxCoeff();
    EXPECT_GT(coarse / fine, 60.0);
    EXPECT_LT(coarse / fine, 160.0);
}

TEST(Gradient, SaturatedSuffixContributesNothing) {
    Rng rng(4);
    for (CellKind cell : {CellKind::Vanilla, CellKind::Gru}) {
        const auto p = random_params(cell, 5, rng);
        // In U(1) mode, sites 3 and 4 of (1, 1, 0, 0) are fixed, so the loss
        // equals the unconstrained loss of the prefix (1, 1).
        const auto full = nll_gradient(p, std::vector<SpinConfiguration>{{1, 1, 0, 0}}, SymmetryMode::U1);
        const auto prefix = nll_gradient(p, std::vector<SpinConfiguration>{{1, 1}}, SymmetryMode::None);
        EXPECT_LT((full.flatten() - prefix.flatten()).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Gradient, SymmetricBatchCancelsOutputBias) {
    Rng rng(5);
    auto p = random_params(CellKind::Gru, 4, rng);
    p["V"].setZero();
    p["c"].setZero();
    const auto g = nll_gradient(p, std::vector<SpinConfiguration>{{0, 1}, {1, 0}}, SymmetryMode::None);
    EXPECT_LT(g.at("c").cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Gradient, CentralDifferenceOnQuadratic) {
    Eigen::MatrixXd a(3, 3);
    a << 2, 1, 0, 1, 3, -1, 0, -1, 4;
    const Eigen::Vector3d b(1, -2, 0.5);
    const auto f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) + b.dot(x); };
    const Eigen::VectorXd x = Eigen::Vector3d(0.3, -0.7, 1.1);
    EXPECT_LT((central_difference(f, x, 1e-3) - (a * x + b)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_THROW(central_difference(f, x, 0.0), Error);
}

TEST(Sgd, Examples) {
    Rng rng(6);
    auto p = random_params(CellKind::Vanilla, 3, rng);
    const auto before = p.tensors().flatten();
    auto g = p.tensors().zeros_like();
    for (std::size_t i = 0; i < g.size(); ++i) g[i].setConstant(2.0);
    sgd_step(p, g, 0.0);
    EXPECT_EQ(p.tensors().flatten(), before);
    sgd_step(p, p.tensors().zeros_like(), 0.1);
    EXPECT_EQ(p.tensors().flatten(), before);

    RnnParameters scalar(CellKind::Vanilla, 1);
    scalar["b"](0, 0) = 1.0;
    auto gs = scalar.tensors().zeros_like();
    gs.at("b")(0, 0) = 2.0;
    sgd_step(scalar, gs, 0.1);
    EXPECT_DOUBLE_EQ(scalar["b"](0, 0), 0.8);

    EXPECT_THROW(sgd_step(p, RnnParameters(CellKind::Vanilla, 4).tensors(), 0.1), Error);
    EXPECT_THROW(sgd_step(p, g, -1.0), Error);
}

TEST(Sgd, SmallStepDescends) {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const CellKind cell = trial % 2 ? CellKind::Gru : CellKind::Vanilla;
        const SymmetryMode mode = trial % 3 ? SymmetryMode::U1 : SymmetryMode::None;
        auto p = random_params(cell, 6, rng);
        const auto batch = random_batch(8, 10, mode, rng);
        const double before = nll(p, batch, mode);
        sgd_step(p, nll_gradient(p, batch, mode), 1e-4);
        EXPECT_LT(nll(p, batch, mode), before) << "trial " << trial;
    }
}

TEST(Shuffle, IsAPermutation) {
    Rng rng(8);
    for (std::size_t len : {0u, 1u, 2u, 17u, 1000u}) {
        std::vector<std::size_t> idx(len);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        shuffle_indices(idx, rng);
        EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), len);
        EXPECT_TRUE(std::all_of(idx.begin(), idx.end(), [&](std::size_t v) { return v < len; }));
    }
}

TEST(TrainingConfigTest, Defaults) {
    const TrainingConfig c;
    EXPECT_EQ(c.hidden_units, 100);
    EXPECT_EQ(c.seed, 1u);
    EXPECT_EQ(c.learning_rate, 0.001);
    EXPECT_EQ(c.batch_size, 50);
    EXPECT_EQ(c.eval_samples, 10000);
    EXPECT_EQ(c.checkpoint_every, 200);
    EXPECT_NO_THROW(c.validate());
    TrainingConfig bad = c;
    bad.learning_rate = 0.0;
    EXPECT_THROW(bad.validate(), Error);
    bad = c;
    bad.batch_size = 0;
    EXPECT_THROW(bad.validate(), Error);
}

TEST(Evaluate, UniformModelIsExactAtTwoSites) {
    const auto gs = ground_state({2, 1.0});
    const Dataset data = small_dataset(2, 50, 3);
    RnnParameters p(CellKind::Gru, 3);
    const EvaluationContext context{gs.spec, &gs, &data, 2000};
    Rng rng(1);
    const auto r = evaluate_rnn(p, SymmetryMode::U1, context, 7, rng);
    EXPECT_EQ(r.epoch, 7);
    EXPECT_NEAR(r.energy, -0.5, 1e-14);
    EXPECT_NEAR(r.energy_stderr, 0.0, 1e-14);
    EXPECT_NEAR(r.epsilon, 0.0, 1e-14);
    EXPECT_NEAR(*r.infidelity, 0.0, 1e-14);
    EXPECT_EQ(r.frac_out_sector, 0.0);
    EXPECT_NEAR(*r.nll, std::numbers::ln2, 1e-14);

    const auto none = evaluate_rnn(p, SymmetryMode::None, context, 7, rng);
    EXPECT_NEAR(none.frac_out_sector, 0.5, 0.05);
    EXPECT_NEAR(*none.infidelity, 0.5, 1e-14);
}

TEST(Evaluate, FallsBackToFreeFermions) {
    RnnParameters p(CellKind::Vanilla, 2);
    const EvaluationContext context{{6, 1.0}, nullptr, nullptr, 500};
    Rng rng(2);
    const auto r = evaluate_rnn(p, SymmetryMode::U1, context, 1, rng);
    EXPECT_FALSE(r.infidelity.has_value());
    EXPECT_FALSE(r.nll.has_value());
    EXPECT_NEAR(r.epsilon, std::abs(r.energy - free_fermion_energy(6, 1.0)) / 6, 1e-15);
}

TEST(Train, RowCountScheduleAndDeterminism) {
    const Dataset data = small_dataset(4, 120, 5);
    const auto gs = ground_state({4, 1.0});
    TrainingConfig config;
    config.hidden_units = 6;
    config.epochs = 5;
    config.eval_every = 1;
    config.eval_samples = 200;
    config.checkpoint_every = 2;
    config.batch_size = 50;

    std::vector<int> saved;
    std::vector<int> streamed;
    const auto first = train(
        config, data, &gs,
        [&](const MetricsRecord& r) {
            streamed.push_back(r.epoch);
            return true;
        },
        [&](int epoch, const RnnParameters&) { saved.push_back(epoch); });
    ASSERT_EQ(first.metrics.size(), 5u);
    EXPECT_EQ(streamed, (std::vector<int>{1, 2, 3, 4, 5}));
    EXPECT_EQ(saved, (std::vector<int>{2, 4, 5}));
    for (const auto& r : first.metrics) {
        EXPECT_EQ(r.frac_out_sector, 0.0);
        EXPECT_GE(r.epsilon, 0.0);
        EXPECT_FALSE(r.seconds.has_value());
    }

    const auto second = train(config, data, &gs);
    EXPECT_EQ(second.params.tensors().flatten(), first.params.tensors().flatten());
    for (std::size_t i = 0; i < first.metrics.size(); ++i) {
        EXPECT_EQ(second.metrics[i].energy, first.metrics[i].energy);
        EXPECT_EQ(second.metrics[i].nll, first.metrics[i].nll);
    }

    config.eval_every = 2;
    EXPECT_EQ(train(config, data, &gs).metrics.size(), 3u);
}

TEST(Train, SinkCanStopEarly) {
    const Dataset data = small_dataset(4, 60, 6);
    TrainingConfig config;
    config.hidden_units = 4;
    config.epochs = 50;
    config.eval_every = 1;
    config.eval_samples = 50;
    std::vector<int> saved;
    const auto r = train(
        config, data, nullptr, [](const MetricsRecord& m) { return m.epoch < 3; },
        [&](int epoch, const RnnParameters&) { saved.push_back(epoch); });
    EXPECT_EQ(r.epochs_run, 3);
    EXPECT_EQ(saved, (std::vector<int>{3}));
}

TEST(Train, LearnsTwoSiteTarget) {
    const Dataset data = small_dataset(2, 400, 7);
    const auto gs = ground_state({2, 1.0});
    TrainingConfig config;
    config.hidden_units = 4;
    config.epochs = 200;
    config.eval_every = 200;
    config.learning_rate = 0.05;
    config.mode = SymmetryMode::None;
    config.eval_samples = 2000;
    const auto r = train(config, data, &gs);
    // Starts at infidelity 0.5 (uniform over four states).
    EXPECT_LT(*r.metrics.back().infidelity, 0.05);
    EXPECT_LT(r.metrics.back().frac_out_sector, 0.05);
}

TEST(Train, RejectsOutOfSectorDataInU1Mode) {
    Dataset data;
    data.n = 4;
    data.samples = {{0, 1, 0, 1}, {1, 1, 1, 0}};
    TrainingConfig config;
    config.hidden_units = 2;
    config.epochs = 1;
    try {
        train(config, data, nullptr);
        FAIL();
    } catch (const SymmetryViolation& e) {
        EXPECT_EQ(e.index(), 1u);
    }
    config.mode = SymmetryMode::None;
    config.eval_samples = 10;
    EXPECT_NO_THROW(train(config, data, nullptr));
}
