// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file landscape.hpp
 * @brief Loss cross-sections f(alpha, beta) = L(theta* + alpha delta + beta eta)
 *        on a random plane, and projection of a training path onto it.
 */

#pragma once

#include <qsr/random.hpp>

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

namespace qsr {

struct LandscapePlane {
    Eigen::VectorXd theta_star;
    Eigen::VectorXd delta;
    Eigen::VectorXd eta;
    std::vector<double> alpha_grid;
    std::vector<double> beta_grid;

    /// Throws DimensionMismatch for length mismatches and InvalidArgument
    /// if either grid is empty or lacks 0.
    void validate() const;
};

/// `count` evenly spaced points over [-range, range]. count must be odd so
/// that 0 is a grid point; the middle entry is exactly 0.
std::vector<double> make_grid(int count, double range);

/// Two independent N(0, 1) vectors of length `dimension`.
std::pair<Eigen::VectorXd, Eigen::VectorXd> random_directions(Eigen::Index dimension, Rng& rng);

struct SurfacePoint {
    double alpha = 0.0;
    double beta = 0.0;
    double loss = 0.0;
};

/// f at every grid point, alpha-major (all betas for the first alpha, ...).
std::vector<SurfacePoint> loss_surface(const LandscapePlane& plane,
                                       const std::function<double(const Eigen::VectorXd&)>& loss_fn);

struct PathPoint {
    double alpha = 0.0;
    double beta = 0.0;
    double residual_norm = 0.0;  ///< ||theta_t - theta* - alpha delta - beta eta||
};

/// Least-squares coordinates of each checkpoint in the plane via the 2x2
/// normal equations. Throws DegeneratePlane if delta and eta are
/// numerically collinear (or either is zero).
std::vector<PathPoint> project_path(const std::vector<Eigen::VectorXd>& checkpoints, const LandscapePlane& plane);

}  // namespace qsr
