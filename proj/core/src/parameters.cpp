// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/error.hpp>
#include <qsr/parameters.hpp>

#include <algorithm>

namespace qsr {

void ParameterSet::add(std::string name, Eigen::MatrixXd value) {
    names_.push_back(std::move(name));
    values_.push_back(std::move(value));
}

Eigen::MatrixXd& ParameterSet::at(std::string_view name) {
    return const_cast<Eigen::MatrixXd&>(std::as_const(*this).at(name));
}

const Eigen::MatrixXd& ParameterSet::at(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw Error(ErrorCode::InvalidArgument, "unknown parameter " + std::string(name));
    return values_[static_cast<std::size_t>(it - names_.begin())];
}

Eigen::Index ParameterSet::parameter_count() const noexcept {
    Eigen::Index count = 0;
    for (const auto& v : values_) count += v.size();
    return count;
}

Eigen::VectorXd ParameterSet::flatten() const {
    Eigen::VectorXd flat(parameter_count());
    Eigen::Index offset = 0;
    for (const auto& v : values_) {
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            for (Eigen::Index c = 0; c < v.cols(); ++c) flat[offset++] = v(r, c);
        }
    }
    return flat;
}

void ParameterSet::assign_flat(const Eigen::VectorXd& flat) {
    if (flat.size() != parameter_count()) {
        throw Error(ErrorCode::DimensionMismatch, "flat vector length " + std::to_string(flat.size()) +
                                                      " != parameter count " +
                                                      std::to_string(parameter_count()));
    }
    Eigen::Index offset = 0;
    for (auto& v : values_) {
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            for (Eigen::Index c = 0; c < v.cols(); ++c) v(r, c) = flat[offset++];
        }
    }
}

bool ParameterSet::same_layout(const ParameterSet& other) const noexcept {
    if (names_ != other.names_) return false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i].rows() != other.values_[i].rows() || values_[i].cols() != other.values_[i].cols()) {
            return false;
        }
    }
    return true;
}

ParameterSet ParameterSet::zeros_like() const {
    ParameterSet out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        out.add(names_[i], Eigen::MatrixXd::Zero(values_[i].rows(), values_[i].cols()));
    }
    return out;
}

bool ParameterSet::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](const auto& v) { return v.allFinite(); });
}

void ParameterSet::axpy(double scale, const ParameterSet& other) {
    if (!same_layout(other)) throw Error(ErrorCode::DimensionMismatch, "parameter layouts differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += scale * other.values_[i];
}

}  // namespace qsr
