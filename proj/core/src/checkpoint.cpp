// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/checkpoint.hpp>
#include <qsr/dataset_io.hpp>
#include <qsr/error.hpp>

#include <nlohmann/json.hpp>

#include <fstream>

namespace qsr {

namespace {

using nlohmann::json;

json row_major(const Eigen::MatrixXd& m) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
    }
    return values;
}

void fill_row_major(const json& node, Eigen::MatrixXd& m, const std::string& name) {
    const auto values = node.get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(m.size())) {
        throw Error(ErrorCode::DimensionMismatch, "tensor '" + name + "' has " + std::to_string(values.size()) +
                                                      " entries, expected " + std::to_string(m.size()));
    }
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = values[k++];
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
    out << text;
}

Checkpoint parse(const json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
        throw Error(ErrorCode::ParseError, "unsupported checkpoint format_version " + std::to_string(version));
    }
    const auto& params = j.at("params");
    if (j.contains("cell_kind")) {
        const CellKind cell = parse_cell_kind(j.at("cell_kind").get<std::string>());
        RnnCheckpoint c{RnnParameters(cell, j.at("d_h").get<int>()),
                        parse_symmetry_mode(j.at("symmetry_mode").get<std::string>()), j.at("n").get<int>(),
                        j.at("epoch").get<int>(), j.at("seed").get<std::uint64_t>()};
        auto& tensors = c.params.tensors();
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            fill_row_major(params.at(tensors.name(i)), tensors[i], tensors.name(i));
        }
        if (params.size() != tensors.size()) throw Error(ErrorCode::ParseError, "unexpected tensors in checkpoint");
        if (c.n < 1) throw Error(ErrorCode::ParseError, "checkpoint n must be positive");
        return c;
    }
    const int n = j.at("n").get<int>();
    RbmCheckpoint c{RbmParameters::zeros(n, j.at("n_h").get<int>()), n, j.at("epoch").get<int>(),
                    j.at("seed").get<std::uint64_t>()};
    fill_row_major(params.at("W"), c.params.weights, "W");
    Eigen::MatrixXd b(n, 1);
    Eigen::MatrixXd hidden(c.params.hidden(), 1);
    fill_row_major(params.at("b"), b, "b");
    fill_row_major(params.at("c"), hidden, "c");
    c.params.visible_bias = b.col(0);
    c.params.hidden_bias = hidden.col(0);
    return c;
}

}  // namespace

std::string checkpoint_to_json(const RnnCheckpoint& c) {
    json j;
    j["format_version"] = kCheckpointFormatVersion;
    j["cell_kind"] = std::string(to_string(c.params.cell()));
    j["n"] = c.n;
    j["d_h"] = c.params.hidden();
    j["symmetry_mode"] = std::string(to_string(c.mode));
    j["epoch"] = c.epoch;
    j["seed"] = c.seed;
    json params = json::object();
    const auto& tensors = c.params.tensors();
    for (std::size_t i = 0; i < tensors.size(); ++i) params[tensors.name(i)] = row_major(tensors[i]);
    j["params"] = std::move(params);
    return j.dump() + "\n";
}

std::string checkpoint_to_json(const RbmCheckpoint& c) {
    json j;
    j["format_version"] = kCheckpointFormatVersion;
    j["n"] = c.n;
    j["n_h"] = c.params.hidden();
    j["seed"] = c.seed;
    j["epoch"] = c.epoch;
    j["params"] = {{"W", row_major(c.params.weights)},
                   {"b", row_major(c.params.visible_bias)},
                   {"c", row_major(c.params.hidden_bias)}};
    return j.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
    try {
        return parse(json::parse(text));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("checkpoint: ") + e.what());
    }
}

void write_checkpoint(const std::filesystem::path& path, const RnnCheckpoint& c) {
    write_text(path, checkpoint_to_json(c));
}

void write_checkpoint(const std::filesystem::path& path, const RbmCheckpoint& c) {
    write_text(path, checkpoint_to_json(c));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    try {
        return checkpoint_from_json(read_text_file(path));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ParseError) throw;
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

std::string checkpoint_filename(int epoch) { return "ckpt_" + std::to_string(epoch) + ".json"; }

}  // namespace qsr
