// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

// Independent oracles shared by the test suites. Nothing here calls the
// library code it is used to check.

#pragma once

#include <qsr/random.hpp>
#include <qsr/spins.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qsr::testing {

/// Full 2^N XY Hamiltonian built from Kronecker products of spin-1/2
/// operators. Site 1 is the leftmost factor, so it is the most significant
/// bit of the row index; spin up (sigma = 0) is the first basis vector.
inline Eigen::MatrixXd full_xy_hamiltonian(int n, double j) {
    Eigen::Matrix2d sx;
    sx << 0.0, 0.5, 0.5, 0.0;
    // S^y = -i A with A real, so S^y S^y = -(A x A).
    Eigen::Matrix2d a;
    a << 0.0, 0.5, -0.5, 0.0;
    const auto kron = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        Eigen::MatrixXd out(x.rows() * y.rows(), x.cols() * y.cols());
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                out.block(r * y.rows(), c * y.cols(), y.rows(), y.cols()) = x(r, c) * y;
            }
        }
        return out;
    };
    const auto site_op = [&](int i, const Eigen::Matrix2d& op1, int k, const Eigen::Matrix2d& op2) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
        for (int s = 0; s < n; ++s) {
            Eigen::MatrixXd factor = Eigen::Matrix2d::Identity();
            if (s == i) factor = op1;
            if (s == k) factor = op2;
            out = kron(out, factor);
        }
        return out;
    };
    const auto dim = Eigen::Index{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i + 1 < n; ++i) {
        h -= j * site_op(i, sx, i + 1, sx);
        h += j * site_op(i, a, i + 1, a);
    }
    return h;
}

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline std::vector<SpinConfiguration> all_configurations(int n) {
    std::vector<SpinConfiguration> out;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
        SpinConfiguration c(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = (code >> (n - 1 - i)) & 1u;
        out.push_back(c);
    }
    return out;
}

inline std::vector<SpinConfiguration> sector_configurations(int n) {
    std::vector<SpinConfiguration> out;
    for (auto& c : all_configurations(n)) {
        int ones = 0;
        for (auto b : c) ones += b;
        if (2 * ones == n) out.push_back(c);
    }
    return out;
}

inline SpinConfiguration random_configuration(int n, Rng& rng) {
    SpinConfiguration c(static_cast<std::size_t>(n));
    for (auto& b : c) b = static_cast<std::uint8_t>(rng() & 1u);
    return c;
}

/// Uniformly random member of the zero-magnetization sector.
inline SpinConfiguration random_sector_configuration(int n, Rng& rng) {
    SpinConfiguration c(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n / 2; ++i) c[static_cast<std::size_t>(i)] = 1;
    for (std::size_t i = c.size(); i > 1; --i) std::swap(c[i - 1], c[rng() % i]);
    return c;
}

/// Fresh scratch directory below the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("qsr_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace qsr::testing
