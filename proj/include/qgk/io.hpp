// Copyright 2026 The QGK Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// File formats: chromosome files, backend/topology descriptions, run
// configs, run manifests, and the per-generation CSV reports.

#ifndef QGK_IO_HPP
#define QGK_IO_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgk/common.hpp"
#include "qgk/ga.hpp"
#include "qgk/genome.hpp"
#include "qgk/qpu_sim.hpp"
#include "qgk/transpile.hpp"

namespace qgk {

using json = nlohmann::json;

namespace detail {

inline json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw data_error("malformed JSON in " + path + ": " + e.what());
    }
}

template <typename T>
T require_field(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key))
        throw data_error(context + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw data_error(context + ": field '" + key + "' has the wrong type");
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    out << text;
    if (!out) throw data_error("write failed: " + path);
}

}  // namespace detail

// ---- Chromosome files ------------------------------------------------------

inline void save_chromosome(const Chromosome& c, const GeneConfig& cfg,
                            const std::string& path) {
    json j;
    j["qubits"] = cfg.qubit_count;
    j["circuit_size"] = cfg.circuit_size;
    j["features"] = cfg.feature_count;
    std::vector<std::string> names;
    for (GateKind k : cfg.allowed_gates) names.emplace_back(gate_name(k));
    j["allowed_gates"] = names;
    j["genes"] = c.genes;
    detail::write_text_file(path, j.dump(2) + "\n");
}

/// Reads a chromosome plus its gene configuration; round-trips written files
/// bit-exactly and validates every gene range.
inline std::pair<Chromosome, GeneConfig> load_chromosome(const std::string& path) {
    const json j = detail::parse_json_file(path);
    const std::string ctx = "chromosome file " + path;
    GeneConfig cfg;
    cfg.qubit_count = detail::require_field<int>(j, "qubits", ctx);
    cfg.circuit_size = detail::require_field<int>(j, "circuit_size", ctx);
    cfg.feature_count = detail::require_field<int>(j, "features", ctx);
    for (const std::string& name :
         detail::require_field<std::vector<std::string>>(j, "allowed_gates", ctx))
        cfg.allowed_gates.push_back(gate_from_name(name));
    Chromosome c;
    c.genes = detail::require_field<std::vector<int>>(j, "genes", ctx);
    cfg.validate();
    validate_chromosome(c, cfg);
    return {std::move(c), std::move(cfg)};
}

// ---- Backend / topology files ----------------------------------------------

struct BackendDescription {
    BackendModel model;
    std::vector<Site> sites;  // empty when the file lists none
};

/// Accepts both the full backend schema {name, qubits, basis_gates, edges,
/// directed?, sites?} and the bare topology form {qubits, edges, directed};
/// a topology file gets the default ECR basis.
inline BackendDescription load_backend(const std::string& path) {
    const json j = detail::parse_json_file(path);
    const std::string ctx = "backend file " + path;
    BackendDescription desc;
    desc.model.qubit_count = detail::require_field<int>(j, "qubits", ctx);
    desc.model.name = j.value("name", std::filesystem::path(path).stem().string());
    desc.model.directed = j.value("directed", true);
    if (j.contains("basis_gates")) {
        for (const std::string& name :
             detail::require_field<std::vector<std::string>>(j, "basis_gates", ctx))
            desc.model.basis_gates.push_back(gate_from_name(name));
    } else {
        desc.model.basis_gates = {GateKind::I, GateKind::RZ, GateKind::SX,
                                  GateKind::X, GateKind::ECR};
    }
    for (const auto& e :
         detail::require_field<std::vector<std::vector<int>>>(j, "edges", ctx)) {
        if (e.size() != 2) throw data_error(ctx + ": edges must be [control, target]");
        desc.model.edges.emplace_back(e[0], e[1]);
    }
    desc.model.validate();
    if (j.contains("sites")) {
        int next_id = 0;
        for (const json& sj : j.at("sites")) {
            Site site;
            site.id = next_id++;
            site.qubits = detail::require_field<std::vector<int>>(sj, "qubits", ctx);
            site.noise_scale = sj.value("noise_scale", 0.0);
            site.bias = sj.value("bias", 0.0);
            for (int q : site.qubits)
                if (q < 0 || q >= desc.model.qubit_count)
                    throw data_error(ctx + ": site qubit out of range");
            for (auto [a, b] : desc.model.edges) {
                const bool a_in = std::find(site.qubits.begin(), site.qubits.end(),
                                            a) != site.qubits.end();
                const bool b_in = std::find(site.qubits.begin(), site.qubits.end(),
                                            b) != site.qubits.end();
                if (a_in && b_in) site.edges.emplace_back(a, b);
            }
            desc.sites.push_back(std::move(site));
        }
    }
    return desc;
}

inline void save_backend(const BackendDescription& desc, const std::string& path) {
    json j;
    j["name"] = desc.model.name;
    j["qubits"] = desc.model.qubit_count;
    j["directed"] = desc.model.directed;
    std::vector<std::string> names;
    for (GateKind k : desc.model.basis_gates) names.emplace_back(gate_name(k));
    j["basis_gates"] = names;
    json edges = json::array();
    for (auto [a, b] : desc.model.edges) edges.push_back({a, b});
    j["edges"] = edges;
    if (!desc.sites.empty()) {
        json sites = json::array();
        for (const Site& s : desc.sites) {
            json sj;
            sj["qubits"] = s.qubits;
            sj["noise_scale"] = s.noise_scale;
            if (s.bias != 0.0) sj["bias"] = s.bias;
            sites.push_back(sj);
        }
        j["sites"] = sites;
    }
    detail::write_text_file(path, j.dump(2) + "\n");
}

// ---- Run configuration -------------------------------------------------

struct RunConfig {
    GaConfig ga;
    std::string backend_path;
    bool constrain_to_connectivity = false;
    std::string raw_text;  // byte-exact snapshot for the manifest
};

inline RunConfig load_run_config(const std::string& path) {
    const std::string text = detail::read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw data_error("malformed JSON in " + path + ": " + e.what());
    }
    const std::string ctx = "run config " + path;
    RunConfig rc;
    rc.raw_text = text;
    rc.ga.population = detail::require_field<int>(j, "population", ctx);
    rc.ga.generations = detail::require_field<int>(j, "generations", ctx);
    rc.ga.parent_count = detail::require_field<int>(j, "parent_count", ctx);
    rc.ga.elite_count = detail::require_field<int>(j, "elite_count", ctx);
    rc.ga.mutation_rate = detail::require_field<double>(j, "mutation_rate", ctx);
    rc.ga.crossover_prob = detail::require_field<double>(j, "crossover_prob", ctx);
    rc.ga.eta = j.value("eta", 0.025);
    const std::string mode = detail::require_field<std::string>(j, "objective", ctx);
    if (mode == "mono")
        rc.ga.objective = ObjectiveMode::mono;
    else if (mode == "multi")
        rc.ga.objective = ObjectiveMode::multi;
    else
        throw data_error(ctx + ": objective must be 'mono' or 'multi'");
    rc.ga.seed = detail::require_field<std::uint64_t>(j, "seed", ctx);
    rc.ga.gene.qubit_count = detail::require_field<int>(j, "qubits", ctx);
    rc.ga.gene.circuit_size = detail::require_field<int>(j, "circuit_size", ctx);
    for (const std::string& name :
         detail::require_field<std::vector<std::string>>(j, "allowed_gates", ctx))
        rc.ga.gene.allowed_gates.push_back(gate_from_name(name));
    const std::string order = j.value("block_order", std::string("layer_major"));
    if (order == "layer_major")
        rc.ga.gene.block_order = BlockOrder::layer_major;
    else if (order == "qubit_major")
        rc.ga.gene.block_order = BlockOrder::qubit_major;
    else
        throw data_error(ctx + ": block_order must be 'layer_major' or 'qubit_major'");
    rc.ga.svm_c = j.value("svm_c", 1.0);
    rc.ga.svm_tol = j.value("svm_tol", 1e-3);
    rc.ga.folds = j.value("folds", 5);
    rc.ga.patience = j.value("patience", 0);
    rc.ga.stochastic_selection = j.value("stochastic_selection", false);
    rc.ga.noise_sigma = j.value("noise_sigma", 0.0);
    rc.backend_path = detail::require_field<std::string>(j, "backend", ctx);
    rc.constrain_to_connectivity = j.value("constrain_to_connectivity", false);
    return rc;
}

// ---- Manifest ----------------------------------------------------------

struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::string version;
    std::string config_snapshot;
    std::vector<std::string> outputs;
    std::string started;
    std::string finished;
    std::string status;  // "complete" when the run finished
};

inline void save_manifest(const RunManifest& m, const std::string& path) {
    json j;
    j["command"] = m.command;
    j["seed"] = m.seed;
    j["version"] = m.version;
    j["config_snapshot"] = m.config_snapshot;
    j["outputs"] = m.outputs;
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["status"] = m.status;
    detail::write_text_file(path, j.dump(2) + "\n");
}

inline std::optional<RunManifest> try_load_manifest(const std::string& path) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    const json j = detail::parse_json_file(path);
    RunManifest m;
    m.command = j.value("command", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.version = j.value("version", "");
    m.config_snapshot = j.value("config_snapshot", "");
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    m.status = j.value("status", "");
    return m;
}

// ---- Generation CSV reports ----------------------------------------------

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_mono_csv(const std::vector<GenerationLog>& logs,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    out << "generation,best_f,mean_f,best_a,best_sigma,best_depth\n";
    for (const GenerationLog& log : logs) {
        const FitnessRecord& best = log.records[log.best_index];
        out << log.generation << "," << format_double(log.best_f) << ","
            << format_double(log.mean_f) << "," << format_double(best.accuracy)
            << "," << format_double(best.sigma) << "," << best.depth << "\n";
    }
}

/// Pareto-front rows per generation, front members ordered by ascending
/// accuracy (ties by population index).
inline void write_pareto_csv(const std::vector<GenerationLog>& logs,
                             const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    out << "generation,member,a,depth\n";
    for (const GenerationLog& log : logs) {
        std::vector<std::size_t> front = log.front;
        std::stable_sort(front.begin(), front.end(), [&](std::size_t x, std::size_t y) {
            return log.records[x].accuracy < log.records[y].accuracy;
        });
        for (std::size_t k = 0; k < front.size(); ++k) {
            const FitnessRecord& r = log.records[front[k]];
            out << log.generation << "," << k << "," << format_double(r.accuracy)
                << "," << r.depth << "\n";
        }
    }
}

}  // namespace qgk

#endif  // QGK_IO_HPP
