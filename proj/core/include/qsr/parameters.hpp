// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qsr {

/// Ordered collection of named dense tensors. Flattening walks the tensors
/// in insertion order, each in row-major order.
class ParameterSet {
public:
    void add(std::string name, Eigen::MatrixXd value);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const std::string& name(std::size_t i) const { return names_.at(i); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

    Eigen::MatrixXd& operator[](std::size_t i) { return values_[i]; }
    const Eigen::MatrixXd& operator[](std::size_t i) const { return values_[i]; }

    /// Throws InvalidArgument for unknown names.
    Eigen::MatrixXd& at(std::string_view name);
    const Eigen::MatrixXd& at(std::string_view name) const;

    [[nodiscard]] Eigen::Index parameter_count() const noexcept;
    [[nodiscard]] Eigen::VectorXd flatten() const;
    /// Inverse of flatten(); throws DimensionMismatch on length mismatch.
    void assign_flat(const Eigen::VectorXd& flat);

    [[nodiscard]] bool same_layout(const ParameterSet& other) const noexcept;
    /// Copy with every tensor set to zero.
    [[nodiscard]] ParameterSet zeros_like() const;
    [[nodiscard]] bool all_finite() const noexcept;

    /// this += scale * other; throws DimensionMismatch on layout mismatch.
    void axpy(double scale, const ParameterSet& other);

private:
    std::vector<std::string> names_;
    std::vector<Eigen::MatrixXd> values_;
};

}  // namespace qsr
