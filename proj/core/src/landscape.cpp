// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/landscape.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace qsr {

void LandscapePlane::validate() const {
    if (delta.size() != theta_star.size() || eta.size() != theta_star.size()) {
        throw Error(ErrorCode::DimensionMismatch, "plane directions must match the parameter count");
    }
    const auto has_zero = [](const std::vector<double>& g) {
        return std::find(g.begin(), g.end(), 0.0) != g.end();
    };
    if (!has_zero(alpha_grid) || !has_zero(beta_grid)) {
        throw Error(ErrorCode::InvalidArgument, "landscape grids must be nonempty and contain 0");
    }
}

std::vector<double> make_grid(int count, double range) {
    if (count < 1 || count % 2 == 0) throw Error(ErrorCode::InvalidArgument, "grid count must be odd and positive");
    if (!(range > 0.0) || !std::isfinite(range)) throw Error(ErrorCode::InvalidArgument, "grid range must be positive");
    std::vector<double> grid(static_cast<std::size_t>(count));
    const int half = count / 2;
    for (int k = 0; k < count; ++k) {
        grid[static_cast<std::size_t>(k)] = half == 0 ? 0.0 : range * static_cast<double>(k - half) / half;
    }
    return grid;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> random_directions(Eigen::Index dimension, Rng& rng) {
    if (dimension < 1) throw Error(ErrorCode::InvalidArgument, "direction dimension must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd delta(dimension);
    Eigen::VectorXd eta(dimension);
    for (Eigen::Index i = 0; i < dimension; ++i) delta[i] = normal(rng);
    for (Eigen::Index i = 0; i < dimension; ++i) eta[i] = normal(rng);
    return {std::move(delta), std::move(eta)};
}

std::vector<SurfacePoint> loss_surface(const LandscapePlane& plane,
                                       const std::function<double(const Eigen::VectorXd&)>& loss_fn) {
    plane.validate();
    std::vector<SurfacePoint> out;
    out.reserve(plane.alpha_grid.size() * plane.beta_grid.size());
    Eigen::VectorXd theta(plane.theta_star.size());
    for (double alpha : plane.alpha_grid) {
        for (double beta : plane.beta_grid) {
            theta = plane.theta_star + alpha * plane.delta + beta * plane.eta;
            out.push_back({alpha, beta, loss_fn(theta)});
        }
    }
    return out;
}

std::vector<PathPoint> project_path(const std::vector<Eigen::VectorXd>& checkpoints, const LandscapePlane& plane) {
    if (plane.delta.size() != plane.theta_star.size() || plane.eta.size() != plane.theta_star.size()) {
        throw Error(ErrorCode::DimensionMismatch, "plane directions must match the parameter count");
    }
    const double dd = plane.delta.squaredNorm();
    const double ee = plane.eta.squaredNorm();
    const double de = plane.delta.dot(plane.eta);
    const double det = dd * ee - de * de;
    if (!(det > 1e-12 * dd * ee) || dd == 0.0 || ee == 0.0) {
        throw Error(ErrorCode::DegeneratePlane, "landscape directions are numerically collinear");
    }

    std::vector<PathPoint> out;
    out.reserve(checkpoints.size());
    for (const auto& theta : checkpoints) {
        if (theta.size() != plane.theta_star.size()) {
            throw Error(ErrorCode::DimensionMismatch, "checkpoint parameter count does not match the plane");
        }
        const Eigen::VectorXd d = theta - plane.theta_star;
        const double rd = plane.delta.dot(d);
        const double re = plane.eta.dot(d);
        const double alpha = (ee * rd - de * re) / det;
        const double beta = (dd * re - de * rd) / det;
        const double residual = (d - alpha * plane.delta - beta * plane.eta).norm();
        out.push_back({alpha, beta, residual});
    }
    return out;
}

}  // namespace qsr
