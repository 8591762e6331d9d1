// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <qsr/error.hpp>
#include <qsr/rnn.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace qsr;

namespace {

RnnParameters scaled_random(CellKind cell, int hidden, double scale, Rng& rng) {
    RnnParameters p = RnnParameters::initialized(cell, hidden, rng);
    auto& t = p.tensors();
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (auto& x : t[i].reshaped()) x = scale * (2.0 * uniform01(rng) - 1.0);
    }
    return p;
}

double sum_exp(const std::vector<double>& lp) {
    double s = 0.0;
    for (double v : lp) s += std::exp(v);
    return s;
}

/// d_h = 1 vanilla model with y_1 = (0.75, 0.25) and y_2 = (0.5, 0.5) when
/// sigma_1 = 0.
RnnParameters hand_model() {
    RnnParameters p(CellKind::Vanilla, 1);
    const double w = 0.8;
    p["W"](0, 0) = w;
    p["U"](0, 0) = -w / std::tanh(w);
    p["V"](0, 0) = std::log(3.0) / std::tanh(w);
    return p;
}

}  // namespace

TEST(Parameters, ShapesAndNames) {
    RnnParameters v(CellKind::Vanilla, 7);
    EXPECT_EQ(v.tensors().names(), (std::vector<std::string>{"W", "U", "b", "V", "c"}));
    EXPECT_EQ(v["W"].rows(), 7);
    EXPECT_EQ(v["W"].cols(), 2);
    EXPECT_EQ(v["U"].rows(), 7);
    EXPECT_EQ(v["V"].rows(), 2);
    EXPECT_EQ(v["V"].cols(), 7);
    EXPECT_EQ(v["c"].size(), 2);
    EXPECT_EQ(v.tensors().parameter_count(), 7 * 2 + 49 + 7 + 14 + 2);

    RnnParameters g(CellKind::Gru, 4);
    EXPECT_EQ(g.tensors().size(), 11u);
    EXPECT_EQ(g.tensors().parameter_count(), 3 * (8 + 16 + 4) + 8 + 2);
    EXPECT_NO_THROW(g.validate());
    g.tensors()[0].resize(3, 2);
    EXPECT_THROW(g.validate(), Error);
    EXPECT_THROW(RnnParameters(CellKind::Gru, 0), Error);
}

TEST(Parameters, InitializationRangeAndZeroBiases) {
    Rng rng(2);
    const auto p = RnnParameters::initialized(CellKind::Gru, 64, rng);
    const double bound = 1.0 / 8.0;
    for (std::size_t i = 0; i < p.tensors().size(); ++i) {
        const auto& name = p.tensors().name(i);
        const auto& m = p.tensors()[i];
        if (name.front() == 'b' || name == "c") {
            EXPECT_EQ(m.norm(), 0.0) << name;
        } else {
            EXPECT_LE(m.cwiseAbs().maxCoeff(), bound) << name;
            EXPECT_GT(m.cwiseAbs().maxCoeff(), 0.9 * bound) << name;
        }
    }
    Rng again(2);
    EXPECT_EQ(RnnParameters::initialized(CellKind::Gru, 64, again).tensors().flatten(), p.tensors().flatten());
}

TEST(Parsing, ModeAndCellNames) {
    EXPECT_EQ(parse_cell_kind("gru"), CellKind::Gru);
    EXPECT_EQ(parse_symmetry_mode("u1"), SymmetryMode::U1);
    EXPECT_EQ(to_string(SymmetryMode::None), "none");
    EXPECT_THROW(parse_cell_kind("lstm"), Error);
    EXPECT_THROW(parse_symmetry_mode("z2"), Error);
}

TEST(VanillaCell, HandValues) {
    RnnParameters p(CellKind::Vanilla, 3);
    EXPECT_EQ(vanilla_cell(p, 1, HiddenState::Constant(3, 0.4)).norm(), 0.0);

    RnnParameters one(CellKind::Vanilla, 1);
    one["W"](0, 0) = 1.0;
    EXPECT_NEAR(vanilla_cell(one, 0, HiddenState::Zero(1))[0], std::tanh(1.0), 1e-15);
    EXPECT_NEAR(vanilla_cell(one, 0, HiddenState::Zero(1))[0], 0.76159415595, 1e-10);
    EXPECT_EQ(vanilla_cell(one, 1, HiddenState::Zero(1))[0], 0.0);

    Rng rng(1);
    const auto r = RnnParameters::initialized(CellKind::Vanilla, 5, rng);
    EXPECT_EQ(vanilla_cell(r, 1, HiddenState::Zero(5)).size(), 5);
    EXPECT_THROW(vanilla_cell(r, 1, HiddenState::Zero(4)), Error);
    EXPECT_THROW(gru_cell(r, 1, HiddenState::Zero(5)), Error);
}

TEST(VanillaCell, MatchesDirectFormula) {
    Rng rng(10);
    const auto p = scaled_random(CellKind::Vanilla, 6, 0.8, rng);
    HiddenState h(6);
    for (auto& x : h) x = uniform01(rng) - 0.5;
    for (std::uint8_t s : {0, 1}) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
        x[s] = 1.0;
        const Eigen::VectorXd expected = (p["W"] * x + p["U"] * h + p["b"].col(0)).array().tanh().matrix();
        EXPECT_LT((vanilla_cell(p, s, h) - expected).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(GruCell, HandValues) {
    RnnParameters p(CellKind::Gru, 3);
    EXPECT_EQ(gru_cell(p, 0, HiddenState::Zero(3)).norm(), 0.0);
    const HiddenState v = HiddenState::LinSpaced(3, -1.0, 2.0);
    EXPECT_LT((gru_cell(p, 1, v) - 0.5 * v).norm(), 1e-15);

    RnnParameters sat(CellKind::Gru, 1);
    sat["b_z"](0, 0) = 10.0;
    const double z = 1.0 / (1.0 + std::exp(-10.0));
    for (double prev : {-0.9, 0.3, 5.0}) {
        const double h = gru_cell(sat, 0, HiddenState::Constant(1, prev))[0];
        EXPECT_NEAR(h, (1.0 - z) * prev, 1e-15);
        EXPECT_LT(std::abs(h), 3e-4);
    }
}

TEST(GruCell, MatchesDirectFormula) {
    Rng rng(11);
    const auto p = scaled_random(CellKind::Gru, 5, 0.9, rng);
    HiddenState h(5);
    for (auto& x : h) x = uniform01(rng) - 0.5;
    const auto sigmoid = [](const Eigen::VectorXd& a) { return (1.0 / (1.0 + (-a.array()).exp())).matrix().eval(); };
    for (std::uint8_t s : {0, 1}) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
        x[s] = 1.0;
        const Eigen::VectorXd z = sigmoid(p["W_z"] * x + p["U_z"] * h + p["b_z"].col(0));
        const Eigen::VectorXd r = sigmoid(p["W_r"] * x + p["U_r"] * h + p["b_r"].col(0));
        const Eigen::VectorXd c =
            (p["W_h"] * x + p["U_h"] * r.cwiseProduct(h) + p["b_h"].col(0)).array().tanh().matrix();
        const Eigen::VectorXd expected = (1.0 - z.array()) * h.array() + z.array() * c.array();
        EXPECT_LT((gru_cell(p, s, h) - expected).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(OutputLayer, Softmax) {
    RnnParameters p(CellKind::Vanilla, 2);
    auto y = output_distribution(p, HiddenState::Constant(2, 3.0));
    EXPECT_DOUBLE_EQ(y[0], 0.5);
    EXPECT_DOUBLE_EQ(y[1], 0.5);
    p["c"](0, 0) = std::log(3.0);
    y = output_distribution(p, HiddenState::Zero(2));
    EXPECT_NEAR(y[0], 0.75, 1e-15);
    EXPECT_NEAR(y[1], 0.25, 1e-15);

    Rng rng(3);
    const auto r = scaled_random(CellKind::Vanilla, 4, 50.0, rng);
    for (int trial = 0; trial < 100; ++trial) {
        HiddenState h(4);
        for (auto& x : h) x = 2.0 * uniform01(rng) - 1.0;
        y = output_distribution(r, h);
        EXPECT_NEAR(y[0] + y[1], 1.0, 1e-12);
        EXPECT_GE(y[0], 0.0);
        EXPECT_GE(y[1], 0.0);
    }
}

TEST(Projection, Examples) {
    const ConditionalDistribution y{0.9, 0.1};
    auto p = u1_project(y, 0, 2, 4);
    EXPECT_EQ(p[0], 1.0);
    EXPECT_EQ(p[1], 0.0);
    p = u1_project(y, 2, 0, 4);
    EXPECT_EQ(p[0], 0.0);
    EXPECT_EQ(p[1], 1.0);
    p = u1_project(y, 1, 1, 4);
    EXPECT_EQ(p[0], 0.9);
    EXPECT_EQ(p[1], 0.1);
}

TEST(Projection, EveryReachableCounterState) {
    Rng rng(17);
    for (int n = 2; n <= 20; n += 2) {
        for (int up = 0; up <= n / 2; ++up) {
            for (int down = 0; down <= n / 2 && up + down < n; ++down) {
                const double a = uniform01(rng) * 0.98 + 0.01;
                const auto p = u1_project({a, 1.0 - a}, up, down, n);
                EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
                EXPECT_EQ(p[0] == 0.0, 2 * up == n);
                EXPECT_EQ(p[1] == 0.0, 2 * down == n);
            }
        }
    }
}

TEST(Projection, RejectsUnreachableCounters) {
    const ConditionalDistribution y{0.5, 0.5};
    for (auto [up, down] : {std::pair{3, 0}, std::pair{0, 3}, std::pair{2, 2}, std::pair{-1, 0}}) {
        try {
            u1_project(y, up, down, 4);
            ADD_FAILURE() << up << "," << down;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidCounters);
        }
    }
}

TEST(LogProb, HandModel) {
    const auto p = hand_model();
    const auto y = conditionals(p, SpinConfiguration{0, 1}, SymmetryMode::None);
    EXPECT_NEAR(y[0][0], 0.75, 1e-14);
    EXPECT_NEAR(y[1][0], 0.5, 1e-14);
    EXPECT_NEAR(log_prob(p, SpinConfiguration{0, 1}, SymmetryMode::None), std::log(0.75 * 0.5), 1e-14);
    EXPECT_NEAR(log_prob(p, SpinConfiguration{0, 1}, SymmetryMode::U1), std::log(0.75), 1e-14);
}

TEST(LogProb, UniformModel) {
    RnnParameters p(CellKind::Gru, 3);
    for (int n : {1, 4, 10}) {
        SpinConfiguration c(static_cast<std::size_t>(n), 1);
        EXPECT_NEAR(log_prob(p, c, SymmetryMode::None), -n * std::numbers::ln2, 1e-13);
        EXPECT_NEAR(amplitude(p, c, SymmetryMode::None), std::pow(2.0, -n / 2.0), 1e-15);
    }
}

TEST(LogProb, OutOfSectorSentinel) {
    Rng rng(4);
    const auto p = RnnParameters::initialized(CellKind::Gru, 6, rng);
    EXPECT_EQ(log_prob(p, SpinConfiguration{1, 1, 1, 0}, SymmetryMode::U1), kLogZero);
    EXPECT_EQ(amplitude(p, SpinConfiguration{1, 1, 1, 0}, SymmetryMode::U1), 0.0);
    EXPECT_TRUE(std::isfinite(log_prob(p, SpinConfiguration{1, 1, 1, 0}, SymmetryMode::None)));
    EXPECT_THROW(log_prob(p, SpinConfiguration{1, 1, 0}, SymmetryMode::U1), Error);
    EXPECT_THROW(log_prob(p, SpinConfiguration{}, SymmetryMode::None), Error);
}

TEST(LogProb, ConditionalsAgreeWithBatchedPass) {
    Rng rng(5);
    for (CellKind cell : {CellKind::Vanilla, CellKind::Gru}) {
        for (SymmetryMode mode : {SymmetryMode::None, SymmetryMode::U1}) {
            const auto p = scaled_random(cell, 7, 1.5, rng);
            const auto configs = qsr::testing::all_configurations(6);
            const auto batched = log_prob_batch(p, configs, mode);
            for (std::size_t k = 0; k < configs.size(); ++k) {
                const auto y = conditionals(p, configs[k], mode);
                ASSERT_EQ(y.size(), 6u);
                double prod = 1.0;
                for (std::size_t i = 0; i < y.size(); ++i) {
                    EXPECT_NEAR(y[i][0] + y[i][1], 1.0, 1e-12);
                    prod *= y[i][configs[k][i]];
                }
                EXPECT_NEAR(prod, std::exp(batched[k]), 1e-13);
                EXPECT_NEAR(amplitude(p, configs[k], mode) * amplitude(p, configs[k], mode), prod, 1e-13);
            }
        }
    }
}

TEST(LogProb, Normalization) {
    Rng rng(6);
    for (CellKind cell : {CellKind::Vanilla, CellKind::Gru}) {
        for (int n = 2; n <= 10; n += 2) {
            for (double scale : {0.3, 2.0}) {
                const auto p = scaled_random(cell, 6, scale, rng);
                EXPECT_NEAR(sum_exp(log_prob_batch(p, qsr::testing::all_configurations(n), SymmetryMode::None)), 1.0,
                            1e-9);
                EXPECT_NEAR(
                    sum_exp(log_prob_batch(p, qsr::testing::sector_configurations(n), SymmetryMode::U1)), 1.0,
                    1e-9);
            }
        }
    }
}

TEST(LogProb, U1SupportIsTheSector) {
    Rng rng(7);
    const auto p = scaled_random(CellKind::Gru, 5, 1.0, rng);
    const auto configs = qsr::testing::all_configurations(8);
    const auto lp = log_prob_batch(p, configs, SymmetryMode::U1);
    for (std::size_t k = 0; k < configs.size(); ++k) {
        EXPECT_EQ(lp[k] == kLogZero, !in_zero_sector(configs[k]));
    }
}

TEST(Sampling, U1SamplesStayInSector) {
    Rng rng(8);
    for (int n : {2, 4, 10, 16}) {
        const auto p = scaled_random(CellKind::Gru, 8, 2.0, rng);
        for (const auto& s : sample(p, n, 5000, SymmetryMode::U1, rng)) ASSERT_TRUE(in_zero_sector(s));
    }
}

TEST(Sampling, UniformModelMarginals) {
    RnnParameters p(CellKind::Vanilla, 4);
    Rng rng(9);
    constexpr std::size_t kCount = 100000;
    const auto samples = sample(p, 6, kCount, SymmetryMode::None, rng);
    for (int i = 0; i < 6; ++i) {
        double ones = 0.0;
        for (const auto& s : samples) ones += s[static_cast<std::size_t>(i)];
        EXPECT_NEAR(ones / kCount, 0.5, 3.5 * std::sqrt(0.25 / kCount));
    }
}

TEST(Sampling, MatchesEnumeration) {
    Rng rng(10);
    for (SymmetryMode mode : {SymmetryMode::None, SymmetryMode::U1}) {
        const auto p = scaled_random(CellKind::Gru, 6, 1.5, rng);
        constexpr std::size_t kCount = 1000000;
        const auto samples = sample(p, 4, kCount, mode, rng);
        std::map<SpinConfiguration, double> freq;
        for (const auto& s : samples) freq[s] += 1.0 / kCount;
        double tv = 0.0;
        for (const auto& c : qsr::testing::all_configurations(4)) {
            tv += 0.5 * std::abs(freq[c] - std::exp(log_prob(p, c, mode)));
        }
        EXPECT_LE(tv, 0.01);
    }
}

TEST(Sampling, DeterministicAndChunkIndependent) {
    Rng init(11);
    const auto p = scaled_random(CellKind::Gru, 6, 1.0, init);
    Rng a(77);
    Rng b(77);
    Rng c(77);
    const auto first = sample(p, 10, 9000, SymmetryMode::None, a);
    const auto second = sample(p, 10, 9000, SymmetryMode::None, b);
    EXPECT_EQ(first, second);
    const auto prefix = sample(p, 10, 100, SymmetryMode::None, c);
    EXPECT_TRUE(std::equal(prefix.begin(), prefix.end(), first.begin()));
}

TEST(Sampling, RejectsBadArguments) {
    RnnParameters p(CellKind::Vanilla, 2);
    Rng rng(1);
    EXPECT_THROW(sample(p, 5, 10, SymmetryMode::U1, rng), Error);
    EXPECT_THROW(sample(p, 0, 10, SymmetryMode::None, rng), Error);
    EXPECT_THROW(sample(p, 4, 0, SymmetryMode::None, rng), Error);
}

TEST(ForwardTraceTest, MarksSaturatedSitesAsFixed) {
    Rng rng(12);
    const auto p = RnnParameters::initialized(CellKind::Gru, 4, rng);
    const std::vector<SpinConfiguration> batch{{1, 1, 0, 0}, {0, 1, 0, 1}};
    const auto trace = teacher_forced_pass(p, batch, SymmetryMode::U1, true);
    ASSERT_EQ(trace.hidden.size(), 5u);
    ASSERT_EQ(trace.probs.size(), 4u);
    ASSERT_EQ(trace.update_gate.size(), 4u);
    EXPECT_TRUE(trace.free(0, 0) && trace.free(1, 0));
    EXPECT_FALSE(trace.free(2, 0) || trace.free(3, 0));
    EXPECT_TRUE(trace.free(0, 1) && trace.free(1, 1) && trace.free(2, 1));
    EXPECT_FALSE(trace.free(3, 1));
    EXPECT_EQ(trace.hidden[0].norm(), 0.0);
}
