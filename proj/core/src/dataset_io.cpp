// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/dataset_io.hpp>
#include <qsr/error.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace qsr {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Dataset parse_dataset(std::istream& in) {
    Dataset data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;

        SpinConfiguration sample;
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) {
            if (token != "0" && token != "1") {
                throw Error(ErrorCode::ParseError,
                            "line " + std::to_string(line_no) + ": expected 0 or 1, got '" + token + "'");
            }
            sample.push_back(token == "1" ? 1 : 0);
        }
        if (data.samples.empty()) {
            data.n = static_cast<int>(sample.size());
        } else if (static_cast<int>(sample.size()) != data.n) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(data.n) + " sites, got " +
                                                   std::to_string(sample.size()));
        }
        data.samples.push_back(std::move(sample));
        data.source_lines.push_back(line_no);
    }
    if (data.samples.empty()) throw Error(ErrorCode::ParseError, "dataset contains no samples");
    return data;
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open dataset " + path.string());
    return parse_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    for (const auto& sample : data.samples) out << to_line(sample) << '\n';
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
    auto out = open_for_write(path);
    write_dataset(out, data);
}

void write_ground_state(const std::filesystem::path& path, const GroundState& gs) {
    nlohmann::json j;
    j["n"] = gs.spec.n;
    j["j"] = gs.spec.j;
    j["energy"] = gs.energy;
    j["basis_order"] = "lex";
    j["amplitudes"] = std::vector<double>(gs.amplitudes.data(), gs.amplitudes.data() + gs.amplitudes.size());
    auto out = open_for_write(path);
    out << j.dump() << '\n';
}

GroundState read_ground_state(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    try {
        if (j.at("basis_order").get<std::string>() != "lex") {
            throw Error(ErrorCode::ParseError, "unsupported basis_order in " + path.string());
        }
        const XYChainSpec spec{j.at("n").get<int>(), j.at("j").get<double>()};
        const auto values = j.at("amplitudes").get<std::vector<double>>();
        Eigen::VectorXd amplitudes = Eigen::Map<const Eigen::VectorXd>(
            values.data(), static_cast<Eigen::Index>(values.size()));
        return ground_state_from_amplitudes(spec, std::move(amplitudes), j.at("energy").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

}  // namespace qsr
