// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <qsr/checkpoint.hpp>
#include <qsr/dataset_io.hpp>
#include <qsr/error.hpp>
#include <qsr/landscape.hpp>
#include <qsr/metrics.hpp>
#include <qsr/rbm_training.hpp>
#include <qsr/training.hpp>
#include <qsr/xy_chain.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>

#ifndef QSR_VERSION_STRING
#define QSR_VERSION_STRING "unknown"
#endif

namespace qsr::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Thrown for command-level validation failures that have no library
/// error code of their own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::SymmetryViolatedSample: return kSymmetryViolation;
        case ErrorCode::DegeneratePlane: return kDegeneratePlane;
        case ErrorCode::MissingOracle: return kMissingOracle;
        case ErrorCode::ConvergenceFailure: return kSolver;
        case ErrorCode::ZeroAmplitudeConfig: return kInternal;
        default: return kValidation;
    }
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_checksum(const fs::path& path) { return hex64(fnv1a64(read_text_file(path))); }

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes text exactly as given (binary mode, no locale).
void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    out << text;
}

/// Ground-state cache next to a dataset: data.txt -> data.gs.json.
fs::path ground_state_cache_path(const fs::path& data) {
    fs::path p = data;
    p.replace_extension(".gs.json");
    return p;
}

// ---------------------------------------------------------------------------
// Config-file merging and manifests
// ---------------------------------------------------------------------------

/// Command-line values of every long option of `sub`, after parsing. Values
/// never set are reported as their default (empty for optional ones).
json effective_arguments(const CLI::App& sub) {
    json out = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help" || name == "config") continue;
        if (opt->get_expected_min() == 0) {
            out[name] = opt->count() > 0 ? "true" : "false";
        } else if (opt->count() > 0) {
            out[name] = opt->results().back();
        } else {
            out[name] = opt->get_default_str();
        }
    }
    return out;
}

std::string json_scalar(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return v.dump();
    if (v.is_number_float()) return format_double(v.get<double>());
    throw UsageError("config key '" + key + "' must be a string, number or boolean");
}

/// Expands `--config file.json` into `--key=value` arguments placed before
/// the user's own flags, so explicit flags win (options take the last value).
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app,
                                       json& config_echo) {
    if (args.empty()) return args;
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) {
        if (s->get_name() == args.front()) sub = s;
    }
    if (sub == nullptr) return args;

    std::optional<std::string> config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path) return args;

    json config;
    try {
        config = json::parse(read_text_file(*config_path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, "config file " + *config_path + ": " + e.what());
    }
    if (!config.is_object()) throw Error(ErrorCode::ParseError, "config file must hold a JSON object");
    config_echo = config;

    std::vector<std::string> expanded{args.front()};
    for (const auto& [key, value] : config.items()) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config" || key == "help") {
            throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
        }
        if (opt->get_expected_min() == 0) {  // flag
            if (value.is_boolean() && value.get<bool>()) expanded.push_back("--" + key);
            else if (!value.is_boolean()) throw UsageError("config key '" + key + "' must be a boolean");
            continue;
        }
        expanded.push_back("--" + key + "=" + json_scalar(value, key));
    }
    expanded.insert(expanded.end(), args.begin() + 1, args.end());
    return expanded;
}

struct Manifest {
    std::string command;
    json arguments;
    json config_file;
    json resolved = json::object();
    json inputs = json::array();
    json outputs = json::array();

    void input(const fs::path& p) { inputs.push_back({{"path", p.string()}, {"fnv1a64", file_checksum(p)}}); }
    void output(const fs::path& p) { outputs.push_back(p.string()); }

    void write(const fs::path& path) const {
        json j;
        j["tool"] = "qsr";
        j["version"] = QSR_VERSION_STRING;
        j["command"] = command;
        j["created_utc"] = utc_now();
        j["arguments"] = arguments;
        if (!config_file.is_null()) j["config_file"] = config_file;
        j["resolved"] = resolved;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        write_file(path, j.dump(2) + "\n");
    }
};

// ---------------------------------------------------------------------------
// Shared loading helpers
// ---------------------------------------------------------------------------

/// Explicit cache, else the cache next to the dataset, else a fresh solve
/// when the chain is small enough. Empty when none applies.
std::optional<GroundState> find_ground_state(const std::optional<fs::path>& explicit_path,
                                             const std::optional<fs::path>& data_path, int n, double j,
                                             Manifest& manifest) {
    std::optional<fs::path> cache = explicit_path;
    if (!cache && data_path && fs::exists(ground_state_cache_path(*data_path))) {
        cache = ground_state_cache_path(*data_path);
    }
    if (cache) {
        GroundState gs = read_ground_state(*cache);
        manifest.input(*cache);
        if (gs.spec.n != n) throw Error(ErrorCode::DimensionMismatch, "ground-state cache is for a different N");
        if (gs.spec.j != j) throw Error(ErrorCode::InvalidArgument, "ground-state cache was solved for another J");
        return gs;
    }
    if (n <= kMaxExactSites) return ground_state({n, j});
    return std::nullopt;
}

Dataset load_dataset(const fs::path& path, Manifest& manifest) {
    Dataset d = read_dataset(path);
    manifest.input(path);
    return d;
}

std::map<int, fs::path> list_checkpoints(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw UsageError("checkpoint directory " + dir.string() + " does not exist");
    static const std::regex pattern(R"(ckpt_(\d+)\.json)");
    std::map<int, fs::path> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern)) found[std::stoi(m[1])] = entry.path();
    }
    return found;
}

std::string metrics_line(const MetricsRecord& r) {
    std::ostringstream s;
    write_metrics_row(s, r);
    return s.str();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct GenDataOptions {
    int n = 0;
    double j = 1.0;
    std::size_t samples = 20000;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_gen_data(const GenDataOptions& o, Manifest& manifest, std::ostream& out) {
    if (o.n > kMaxExactSites) {
        throw Error(ErrorCode::SizeLimitExceeded,
                    "gen-data supports N <= " + std::to_string(kMaxExactSites) + "; import larger datasets");
    }
    if (o.samples < 1) throw UsageError("--samples must be positive");
    const XYChainSpec spec{o.n, o.j};
    spec.validate();
    const GroundState gs = ground_state(spec);
    Rng rng = make_stream(o.seed, "gen-data");
    const Dataset data = sample_dataset(gs, o.samples, rng);

    const fs::path data_path(o.out);
    const fs::path cache = ground_state_cache_path(data_path);
    write_dataset(data_path, data);
    write_ground_state(cache, gs);
    manifest.output(data_path);
    manifest.output(cache);
    manifest.resolved = {{"n", o.n},          {"j", o.j},
                         {"samples", o.samples}, {"seed", o.seed},
                         {"stream", "gen-data"}, {"sector_dimension", gs.basis.size()},
                         {"energy", gs.energy}};
    fs::path manifest_path = data_path;
    manifest_path.replace_extension(".manifest.json");
    manifest.write(manifest_path);

    out << "N = " << o.n << ", sector dimension " << gs.basis.size() << ", exact energy "
        << format_double(gs.energy) << " (" << format_double(gs.energy / o.n) << " per site)\n";
    out << "wrote " << data.size() << " samples to " << data_path.string() << "\n";
    return kOk;
}

struct TrainOptions {
    std::string data;
    std::string model;
    std::optional<std::string> symmetry;
    std::string cell = "gru";
    std::optional<int> hidden_units;
    std::optional<double> lr;
    int batch_size = 50;
    std::optional<int> epochs;
    int eval_every = 10;
    int eval_samples = 10000;
    std::optional<std::uint64_t> seed;
    int k = 100;
    int pos_batch = 100;
    int neg_batch = 200;
    int checkpoint_every = 200;
    double j = 1.0;
    bool record_time = false;
    std::string out;
};

int cmd_train(const TrainOptions& o, const CLI::App& sub, Manifest& manifest, std::ostream& out) {
    const bool rbm = o.model == "rbm";
    if (o.model != "rnn" && o.model != "u1-rnn" && !rbm) {
        throw UsageError("--model must be one of rnn, u1-rnn, rbm");
    }
    const auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
    for (const char* flag : rbm ? std::vector<const char*>{"--symmetry", "--cell", "--batch-size"}
                                : std::vector<const char*>{"--k", "--pos-batch", "--neg-batch"}) {
        if (given(flag)) throw UsageError(std::string(flag) + " does not apply to --model " + o.model);
    }

    const fs::path data_path(o.data);
    const Dataset data = load_dataset(data_path, manifest);
    const std::optional<GroundState> gs = find_ground_state(std::nullopt, data_path, data.n, o.j, manifest);
    const GroundState* gs_ptr = gs ? &*gs : nullptr;

    const fs::path out_dir(o.out);
    fs::create_directories(out_dir);
    const fs::path metrics_path = out_dir / "metrics.csv";
    std::ofstream metrics(metrics_path, std::ios::binary);
    if (!metrics) throw UsageError("cannot write " + metrics_path.string());
    write_metrics_header(metrics);
    const MetricsSink sink = [&](const MetricsRecord& r) {
        write_metrics_row(metrics, r);
        metrics.flush();
        out << "epoch " << r.epoch << "  energy " << format_double(r.energy) << "  eps "
            << format_double(r.epsilon) << "  out-of-sector " << format_double(r.frac_out_sector) << "\n";
        return true;
    };
    std::vector<fs::path> written;
    int epochs_run = 0;

    if (rbm) {
        RbmTrainingConfig c = RbmTrainingConfig::defaults_for(data.n);
        if (o.hidden_units) c.hidden_units = *o.hidden_units;
        if (o.lr) c.base_lr = *o.lr;
        if (o.epochs) c.epochs = *o.epochs;
        if (o.seed) c.seed = *o.seed;
        c.gibbs_k = o.k;
        c.positive_batch = o.pos_batch;
        c.negative_batch = o.neg_batch;
        c.eval_every = o.eval_every;
        c.eval_samples = o.eval_samples;
        c.checkpoint_every = o.checkpoint_every;
        c.j = o.j;
        c.record_time = o.record_time;
        c.validate();
        manifest.resolved = {{"model", "rbm"},          {"n", data.n},
                             {"hidden_units", c.hidden_units}, {"seed", c.seed},
                             {"base_lr", c.base_lr},     {"lr_decay", c.lr_decay},
                             {"positive_batch", c.positive_batch}, {"negative_batch", c.negative_batch},
                             {"gibbs_k", c.gibbs_k},     {"epochs", c.epochs},
                             {"eval_every", c.eval_every}, {"eval_samples", c.eval_samples},
                             {"checkpoint_every", c.checkpoint_every}, {"j", c.j},
                             {"exact_reference", gs_ptr != nullptr}};
        const auto result = rbm_train(c, data, gs_ptr, sink, [&](int epoch, const RbmParameters& p) {
            const fs::path path = out_dir / checkpoint_filename(epoch);
            write_checkpoint(path, RbmCheckpoint{p, data.n, epoch, c.seed});
            written.push_back(path);
        });
        epochs_run = result.epochs_run;
    } else {
        TrainingConfig c;
        c.cell = parse_cell_kind(o.cell);
        c.mode = o.model == "u1-rnn" ? SymmetryMode::U1 : SymmetryMode::None;
        if (o.symmetry) {
            const SymmetryMode requested = parse_symmetry_mode(*o.symmetry);
            if (o.model == "u1-rnn" && requested != SymmetryMode::U1) {
                throw UsageError("--model u1-rnn conflicts with --symmetry " + *o.symmetry);
            }
            c.mode = requested;
        }
        if (o.hidden_units) c.hidden_units = *o.hidden_units;
        if (o.lr) c.learning_rate = *o.lr;
        if (o.epochs) c.epochs = *o.epochs;
        if (o.seed) c.seed = *o.seed;
        c.batch_size = o.batch_size;
        c.eval_every = o.eval_every;
        c.eval_samples = o.eval_samples;
        c.checkpoint_every = o.checkpoint_every;
        c.j = o.j;
        c.record_time = o.record_time;
        c.validate();
        manifest.resolved = {{"model", o.model},
                             {"n", data.n},
                             {"cell", std::string(to_string(c.cell))},
                             {"symmetry", std::string(to_string(c.mode))},
                             {"hidden_units", c.hidden_units},
                             {"seed", c.seed},
                             {"learning_rate", c.learning_rate},
                             {"batch_size", c.batch_size},
                             {"epochs", c.epochs},
                             {"eval_every", c.eval_every},
                             {"eval_samples", c.eval_samples},
                             {"checkpoint_every", c.checkpoint_every},
                             {"j", c.j},
                             {"exact_reference", gs_ptr != nullptr}};
        try {
            const auto result = train(c, data, gs_ptr, sink, [&](int epoch, const RnnParameters& p) {
                const fs::path path = out_dir / checkpoint_filename(epoch);
                write_checkpoint(path, RnnCheckpoint{p, c.mode, data.n, epoch, c.seed});
                written.push_back(path);
            });
            epochs_run = result.epochs_run;
        } catch (const SymmetryViolation& e) {
            const std::size_t line = e.index() < data.source_lines.size() ? data.source_lines[e.index()] : 0;
            throw SymmetryViolation(e.index(), "line " + std::to_string(line) + " of " + data_path.string() +
                                                   " is outside the S^z = 0 sector");
        }
    }

    manifest.output(metrics_path);
    for (const auto& p : written) manifest.output(p);
    manifest.write(out_dir / "manifest.json");
    out << "trained " << epochs_run << " epochs; wrote " << metrics_path.string() << " and " << written.size()
        << " checkpoints\n";
    return kOk;
}

struct EvalOptions {
    std::string checkpoint;
    std::optional<std::string> data;
    std::optional<std::string> gs;
    int samples = 10000;
    std::uint64_t seed = 1;
    double j = 1.0;
    bool require_infidelity = false;
    std::optional<std::string> out;
};

int cmd_eval(const EvalOptions& o, Manifest& manifest, std::ostream& out) {
    if (o.samples < 1) throw UsageError("--samples must be positive");
    const Checkpoint ckpt = read_checkpoint(o.checkpoint);
    manifest.input(o.checkpoint);
    const int n = std::visit([](const auto& c) { return c.n; }, ckpt);
    const int epoch = std::visit([](const auto& c) { return c.epoch; }, ckpt);

    std::optional<Dataset> data;
    std::optional<fs::path> data_path;
    if (o.data) {
        data_path = fs::path(*o.data);
        data = load_dataset(*data_path, manifest);
        if (data->n != n) throw Error(ErrorCode::DimensionMismatch, "dataset N does not match the checkpoint");
    }
    std::optional<fs::path> gs_path;
    if (o.gs) gs_path = fs::path(*o.gs);
    const std::optional<GroundState> gs = find_ground_state(gs_path, data_path, n, o.j, manifest);
    if (o.require_infidelity && !gs) {
        throw Error(ErrorCode::MissingOracle, "infidelity needs a ground state; none available for N = " +
                                                  std::to_string(n));
    }

    const EvaluationContext context{{n, o.j}, gs ? &*gs : nullptr, data ? &*data : nullptr, o.samples};
    Rng rng = make_stream(o.seed, "eval");
    MetricsRecord record;
    if (const auto* r = std::get_if<RnnCheckpoint>(&ckpt)) {
        if (data && r->mode == SymmetryMode::U1) check_sector(data->samples, SymmetryMode::U1);
        record = evaluate_rnn(r->params, r->mode, context, epoch, rng);
    } else {
        record = evaluate_rbm(std::get<RbmCheckpoint>(ckpt).params, context, epoch, rng);
    }

    const std::string text = std::string(kMetricsHeader) + "\n" + metrics_line(record);
    out << text;
    manifest.resolved = {{"n", n}, {"samples", o.samples}, {"seed", o.seed}, {"stream", "eval"},
                         {"exact_reference", gs.has_value()}};
    if (o.out) {
        const fs::path dir(*o.out);
        write_file(dir / "eval.csv", text);
        manifest.output(dir / "eval.csv");
        manifest.write(dir / "manifest.json");
    }
    return kOk;
}

struct LandscapeOptions {
    std::string checkpoints;
    std::string data;
    int grid = 41;
    double range = 1.0;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_landscape(const LandscapeOptions& o, Manifest& manifest, std::ostream& out) {
    const auto found = list_checkpoints(o.checkpoints);
    if (found.size() < 2) {
        throw UsageError("landscape needs the final checkpoint and at least one earlier one in " + o.checkpoints);
    }
    std::vector<RnnCheckpoint> path_ckpts;
    for (const auto& [epoch, file] : found) {
        auto c = read_checkpoint(file);
        manifest.input(file);
        auto* r = std::get_if<RnnCheckpoint>(&c);
        if (r == nullptr) throw UsageError("landscape requires RNN checkpoints; " + file.string() + " is an RBM");
        if (!path_ckpts.empty() && !r->params.tensors().same_layout(path_ckpts.front().params.tensors())) {
            throw Error(ErrorCode::DimensionMismatch, "checkpoints in " + o.checkpoints + " differ in shape");
        }
        path_ckpts.push_back(std::move(*r));
    }
    const RnnCheckpoint& final_ckpt = path_ckpts.back();

    const fs::path data_path(o.data);
    const Dataset data = load_dataset(data_path, manifest);
    if (data.n != final_ckpt.n) throw Error(ErrorCode::DimensionMismatch, "dataset N does not match the checkpoints");
    check_sector(data.samples, final_ckpt.mode);

    Rng rng = make_stream(o.seed, "landscape");
    const Eigen::VectorXd theta_star = final_ckpt.params.tensors().flatten();
    auto [delta, eta] = random_directions(theta_star.size(), rng);
    const LandscapePlane plane{theta_star, std::move(delta), std::move(eta), make_grid(o.grid, o.range),
                               make_grid(o.grid, o.range)};

    std::vector<Eigen::VectorXd> thetas;
    for (const auto& c : path_ckpts) thetas.push_back(c.params.tensors().flatten());
    const auto path = project_path(thetas, plane);

    RnnParameters scratch = final_ckpt.params;
    const auto loss = [&](const Eigen::VectorXd& theta) {
        scratch.tensors().assign_flat(theta);
        return nll(scratch, data.samples, final_ckpt.mode);
    };
    const auto surface = loss_surface(plane, loss);

    const fs::path dir(o.out);
    std::string text = "alpha,beta,loss\n";
    for (const auto& p : surface) {
        text += format_double(p.alpha) + "," + format_double(p.beta) + "," + format_double(p.loss) + "\n";
    }
    write_file(dir / "surface.csv", text);

    text = "epoch,alpha,beta,residual_norm\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        text += std::to_string(path_ckpts[i].epoch) + "," + format_double(path[i].alpha) + "," +
                format_double(path[i].beta) + "," + format_double(path[i].residual_norm) + "\n";
    }
    write_file(dir / "path.csv", text);

    json epochs = json::array();
    for (const auto& c : path_ckpts) epochs.push_back(c.epoch);
    const double centre = surface[surface.size() / 2].loss;
    const json meta = {{"evaluation_set", "training dataset"},
                       {"data", data_path.string()},
                       {"data_fnv1a64", file_checksum(data_path)},
                       {"n", data.n},
                       {"cell", std::string(to_string(final_ckpt.params.cell()))},
                       {"symmetry", std::string(to_string(final_ckpt.mode))},
                       {"hidden_units", final_ckpt.params.hidden()},
                       {"parameter_count", theta_star.size()},
                       {"grid", o.grid},
                       {"range", o.range},
                       {"seed", o.seed},
                       {"direction_stream", "landscape"},
                       {"final_epoch", final_ckpt.epoch},
                       {"checkpoint_epochs", epochs},
                       {"loss_at_origin", format_double(centre)}};
    write_file(dir / "landscape.json", meta.dump(2) + "\n");

    manifest.resolved = meta;
    for (const char* f : {"surface.csv", "path.csv", "landscape.json"}) manifest.output(dir / f);
    manifest.write(dir / "manifest.json");
    out << "surface " << surface.size() << " points, path " << path.size() << " checkpoints, f(0,0) = "
        << format_double(centre) << "\n";
    return kOk;
}

struct SampleOptions {
    std::string checkpoint;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_sample(const SampleOptions& o, Manifest& manifest, std::ostream& out) {
    if (o.samples < 1) throw UsageError("--samples must be positive");
    const Checkpoint ckpt = read_checkpoint(o.checkpoint);
    manifest.input(o.checkpoint);
    Rng rng = make_stream(o.seed, "sample");
    Dataset d;
    if (const auto* r = std::get_if<RnnCheckpoint>(&ckpt)) {
        d.n = r->n;
        d.samples = sample(r->params, r->n, o.samples, r->mode, rng);
    } else {
        const auto& b = std::get<RbmCheckpoint>(ckpt);
        d.n = b.n;
        d.samples = sample_rbm(b.params, o.samples, rng);
    }
    const fs::path path(o.out);
    write_dataset(path, d);
    manifest.output(path);
    manifest.resolved = {{"n", d.n}, {"samples", o.samples}, {"seed", o.seed}, {"stream", "sample"}};
    fs::path manifest_path = path;
    manifest_path.replace_extension(".manifest.json");
    manifest.write(manifest_path);
    out << "wrote " << d.size() << " samples to " << path.string() << "\n";
    return kOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum state reconstruction of the XY chain with recurrent networks and RBMs", "qsr"};
    app.require_subcommand(1);
    app.set_version_flag("--version", QSR_VERSION_STRING);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

    std::string config_path;
    const auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file of flag values; explicit flags win");
    };

    GenDataOptions gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Solve the chain exactly and sample a measurement dataset");
    gen_cmd->add_option("--n", gen.n, "Number of sites (even, <= 20)")->required();
    gen_cmd->add_option("--j", gen.j, "Coupling J");
    gen_cmd->add_option("--samples", gen.samples, "Number of samples");
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--out", gen.out, "Dataset file; the ground-state cache is written beside it")->required();
    add_config(gen_cmd);

    TrainOptions tr;
    auto* train_cmd = app.add_subcommand("train", "Train a model on a dataset");
    train_cmd->add_option("--data", tr.data, "Dataset file")->required();
    train_cmd->add_option("--model", tr.model, "rnn, u1-rnn or rbm")->required();
    train_cmd->add_option("--symmetry", tr.symmetry, "none or u1 (RNN only)");
    train_cmd->add_option("--cell", tr.cell, "gru or vanilla (RNN only)");
    train_cmd->add_option("--hidden-units", tr.hidden_units, "Hidden units (RNN 100; RBM by N)");
    train_cmd->add_option("--lr", tr.lr, "Learning rate (RNN 0.001; RBM base rate 0.01)");
    train_cmd->add_option("--batch-size", tr.batch_size, "Mini-batch size (RNN only)");
    train_cmd->add_option("--epochs", tr.epochs, "Epochs (RNN 1000, RBM 2000)");
    train_cmd->add_option("--eval-every", tr.eval_every, "Epochs between metric rows");
    train_cmd->add_option("--eval-samples", tr.eval_samples, "Model samples per metric row");
    train_cmd->add_option("--seed", tr.seed, "Seed (RNN 1; RBM by N)");
    train_cmd->add_option("--k", tr.k, "Gibbs sweeps per negative phase (RBM only)");
    train_cmd->add_option("--pos-batch", tr.pos_batch, "Positive-phase batch (RBM only)");
    train_cmd->add_option("--neg-batch", tr.neg_batch, "Negative-phase chains (RBM only)");
    train_cmd->add_option("--checkpoint-every", tr.checkpoint_every, "Epochs between checkpoints (0: final only)");
    train_cmd->add_option("--j", tr.j, "Coupling J for the energy metrics");
    train_cmd->add_flag("--record-time", tr.record_time, "Fill the seconds column");
    train_cmd->add_option("--out", tr.out, "Output directory")->required();
    add_config(train_cmd);

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "Print the metrics of a checkpoint");
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
    eval_cmd->add_option("--data", ev.data, "Dataset for the NLL column (its ground-state cache is used)");
    eval_cmd->add_option("--gs", ev.gs, "Ground-state cache file");
    eval_cmd->add_option("--samples", ev.samples, "Model samples");
    eval_cmd->add_option("--seed", ev.seed, "Random seed");
    eval_cmd->add_option("--j", ev.j, "Coupling J");
    eval_cmd->add_flag("--require-infidelity", ev.require_infidelity, "Fail (exit 5) without a ground state");
    eval_cmd->add_option("--out", ev.out, "Also write eval.csv and a manifest here");
    add_config(eval_cmd);

    LandscapeOptions ls;
    auto* land_cmd = app.add_subcommand("landscape", "Loss cross-section on a random plane and the training path");
    land_cmd->add_option("--checkpoints", ls.checkpoints, "Directory of ckpt_<epoch>.json files")->required();
    land_cmd->add_option("--data", ls.data, "Training dataset (evaluation set of the loss)")->required();
    land_cmd->add_option("--grid", ls.grid, "Points per axis (odd)");
    land_cmd->add_option("--range", ls.range, "Half-width of the alpha and beta ranges");
    land_cmd->add_option("--seed", ls.seed, "Seed of the random directions");
    land_cmd->add_option("--out", ls.out, "Output directory")->required();
    add_config(land_cmd);

    SampleOptions sm;
    auto* sample_cmd = app.add_subcommand("sample", "Draw model samples into a dataset file");
    sample_cmd->add_option("--checkpoint", sm.checkpoint, "Checkpoint file")->required();
    sample_cmd->add_option("--samples", sm.samples, "Number of samples");
    sample_cmd->add_option("--seed", sm.seed, "Random seed");
    sample_cmd->add_option("--out", sm.out, "Output dataset file")->required();
    add_config(sample_cmd);

    Manifest manifest;
    try {
        std::vector<std::string> expanded = expand_config(args, app, manifest.config_file);
        std::reverse(expanded.begin(), expanded.end());
        app.parse(expanded);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    }

    try {
        const CLI::App* sub = app.get_subcommands().front();
        manifest.command = sub->get_name();
        manifest.arguments = effective_arguments(*sub);
        if (sub == gen_cmd) return cmd_gen_data(gen, manifest, out);
        if (sub == train_cmd) return cmd_train(tr, *train_cmd, manifest, out);
        if (sub == eval_cmd) return cmd_eval(ev, manifest, out);
        if (sub == land_cmd) return cmd_landscape(ls, manifest, out);
        return cmd_sample(sm, manifest, out);
    } catch (const SymmetryViolation& e) {
        err << "error: " << e.what() << "\n";
        return kSymmetryViolation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace qsr::cli
