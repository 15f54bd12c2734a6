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
// Command-line front end: synthetic data generation, genetic optimization
// runs, single-chromosome evaluation, and partitioned-QPU reports.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qgk/common.hpp"
#include "qgk/dataset.hpp"
#include "qgk/ga.hpp"
#include "qgk/io.hpp"
#include "qgk/kernel.hpp"
#include "qgk/qpu_sim.hpp"
#include "qgk/rng.hpp"
#include "qgk/svm.hpp"
#include "qgk/transpile.hpp"

namespace {

namespace fs = std::filesystem;
using qgk::json;

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

unsigned default_threads() {
    if (const char* env = std::getenv("QGK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

qgk::BackendModel default_line_backend(int qubits) {
    qgk::BackendModel b;
    b.name = "line" + std::to_string(qubits) + "_ecr";
    b.qubit_count = qubits;
    b.basis_gates = {qgk::GateKind::I, qgk::GateKind::RZ, qgk::GateKind::SX,
                     qgk::GateKind::X, qgk::GateKind::ECR};
    for (int q = 0; q + 1 < qubits; ++q) b.edges.emplace_back(q, q + 1);
    return b;
}

struct GenDataArgs {
    std::size_t samples = 0;
    std::size_t features = 18;
    double bayes_accuracy = 0.75;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen_data(const GenDataArgs& args) {
    const double overlap = 2.0 * (1.0 - args.bayes_accuracy);
    const qgk::Dataset d =
        qgk::synth_generate(args.samples, args.features, overlap, args.seed);
    qgk::write_dataset_csv(d, args.out);
    std::cout << "wrote " << d.sample_count << "x" << d.feature_count
              << " dataset to " << args.out << "\n";
    return 0;
}

struct OptimizeArgs {
    std::string config_path;
    std::string data_path;
    std::string out_dir;
    std::string resume_dir;
    std::string backend_override;
    unsigned threads = default_threads();
};

int cmd_optimize(const OptimizeArgs& args) {
    qgk::RunConfig rc = qgk::load_run_config(args.config_path);
    const std::string out_dir = args.resume_dir.empty() ? args.out_dir : args.resume_dir;
    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();

    if (const auto existing = qgk::try_load_manifest(manifest_path)) {
        if (existing->status == "complete" && existing->config_snapshot == rc.raw_text) {
            std::cout << "run already complete in " << out_dir << "; nothing to do\n";
            return 0;
        }
        if (args.resume_dir.empty())
            throw qgk::data_error("output directory already holds a different run: " +
                                  out_dir);
    }
    fs::create_directories(out_dir);

    qgk::Dataset data = qgk::load_csv(args.data_path);
    std::vector<std::string> warnings;
    data = qgk::rescale_unit_interval(std::move(data), &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

    const std::string backend_path =
        args.backend_override.empty() ? rc.backend_path : args.backend_override;
    const qgk::BackendDescription backend = qgk::load_backend(backend_path);

    rc.ga.gene.feature_count = static_cast<int>(data.feature_count);
    if (rc.constrain_to_connectivity)
        rc.ga.gene.connectivity = backend.model.edges;
    rc.ga.threads = args.threads;

    qgk::RunManifest manifest;
    manifest.command = "optimize";
    manifest.seed = rc.ga.seed;
    manifest.version = qgk::kVersion;
    manifest.config_snapshot = rc.raw_text;
    manifest.started = timestamp_utc();

    const qgk::RunResult result = qgk::run_ga(rc.ga, data, backend.model);

    if (rc.ga.objective == qgk::ObjectiveMode::mono) {
        const std::string csv = (fs::path(out_dir) / "generations.csv").string();
        qgk::write_mono_csv(result.logs, csv);
        manifest.outputs.push_back(csv);
        const std::string best = (fs::path(out_dir) / "best_chromosome.json").string();
        qgk::save_chromosome(result.best, rc.ga.gene, best);
        manifest.outputs.push_back(best);
    } else {
        const std::string csv = (fs::path(out_dir) / "pareto.csv").string();
        qgk::write_pareto_csv(result.logs, csv);
        manifest.outputs.push_back(csv);
        const qgk::GenerationLog& last = result.logs.back();
        int member = 0;
        for (std::size_t idx : last.front) {
            const std::string path =
                (fs::path(out_dir) /
                 ("front_member_" + std::to_string(member++) + ".json"))
                    .string();
            qgk::save_chromosome(result.final_population[idx], rc.ga.gene, path);
            manifest.outputs.push_back(path);
        }
    }

    manifest.finished = timestamp_utc();
    manifest.status = "complete";
    qgk::save_manifest(manifest, manifest_path);
    std::cout << "kernel evaluations: " << result.kernel_evaluations << "\n";
    std::cout << "best fitness: " << qgk::format_double(result.best_record.fitness)
              << " (a=" << qgk::format_double(result.best_record.accuracy)
              << ", sigma=" << qgk::format_double(result.best_record.sigma)
              << ", depth=" << result.best_record.depth << ")\n";
    std::cout << "results in " << out_dir << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string chromosome_path;
    std::string data_path;
    std::string backend_path;
    std::string out_path;
    std::string dump_kernel_path;
    double noise = 0.0;
    std::optional<long> shots;
    std::uint64_t seed = 0;
    double svm_c = 1.0;
    double eta = 0.025;
    int folds = 5;
    unsigned threads = default_threads();
};

int cmd_evaluate(const EvaluateArgs& args) {
    const auto [chrom, gene_cfg] = qgk::load_chromosome(args.chromosome_path);
    qgk::Dataset data = qgk::load_csv(args.data_path);
    data = qgk::rescale_unit_interval(std::move(data));
    if (static_cast<int>(data.feature_count) != gene_cfg.feature_count)
        throw qgk::data_error("chromosome expects " +
                              std::to_string(gene_cfg.feature_count) +
                              " features, dataset has " +
                              std::to_string(data.feature_count));

    qgk::BackendModel backend = args.backend_path.empty()
                                    ? default_line_backend(gene_cfg.qubit_count)
                                    : qgk::load_backend(args.backend_path).model;
    if (backend.qubit_count < gene_cfg.qubit_count)
        throw qgk::data_error("backend has fewer qubits than the chromosome");

    const std::vector<qgk::Statevector> states =
        qgk::embed_all(chrom, gene_cfg, data, args.threads);
    qgk::KernelMatrix kernel = qgk::kernel_matrix(states, args.threads);
    if (args.noise > 0.0 || args.shots)
        kernel = qgk::noisy_kernel(kernel, args.shots, args.noise, 0.0,
                                   qgk::derive_seed(args.seed, {0xE7A1}));
    if (!args.dump_kernel_path.empty())
        qgk::write_kernel_csv(kernel, args.dump_kernel_path);

    const double sigma = qgk::offdiag_std(kernel);
    const qgk::FoldAssignment folds =
        qgk::kfold_split(data, args.folds, qgk::derive_seed(args.seed, {0xF01D5}));
    const double accuracy =
        qgk::cv_accuracy(kernel, data.labels, folds, args.svm_c);
    const qgk::Circuit structure = qgk::decode(chrom, gene_cfg, data.row(0));
    const int d = qgk::depth(qgk::route(structure, backend).circuit);

    json out;
    out["accuracy"] = accuracy;
    out["sigma"] = sigma;
    out["depth"] = d;
    out["fitness"] = qgk::fitness_mono(accuracy, sigma, args.eta);
    out["eta"] = args.eta;
    out["noise"] = args.noise;
    out["shots"] = args.shots ? json(*args.shots) : json(nullptr);
    out["seed"] = args.seed;
    const std::string text = out.dump(2) + "\n";
    std::cout << text;
    if (!args.out_path.empty()) qgk::detail::write_text_file(args.out_path, text);
    return 0;
}

struct SitesArgs {
    std::vector<std::string> backend_paths;
    std::string chromosome_path;
    std::string data_path;
    std::string out_path;
    std::optional<long> shots;
    std::uint64_t seed = 0;
    int sites_count = 0;
    double noise_lo = 0.0;
    double noise_hi = 0.0;
    int exclude_worst = 0;
    std::vector<int> exclude_ids;
    std::size_t population = 0;
    unsigned threads = default_threads();
};

std::vector<qgk::Site> sites_for(const qgk::BackendDescription& desc,
                                 const SitesArgs& args) {
    std::vector<qgk::Site> sites;
    if (!desc.sites.empty() && args.sites_count == 0) {
        sites = desc.sites;
    } else {
        if (args.sites_count <= 0)
            throw qgk::data_error("backend lists no sites; pass --sites-count with "
                                  "--noise-lo/--noise-hi");
        qgk::NoiseProfile profile;
        profile.log_uniform_lo = args.noise_lo;
        profile.log_uniform_hi = args.noise_hi;
        sites = qgk::build_sites(desc.model, args.sites_count, profile, args.seed);
    }
    if (!args.exclude_ids.empty()) {
        std::erase_if(sites, [&](const qgk::Site& s) {
            return std::find(args.exclude_ids.begin(), args.exclude_ids.end(),
                             s.id) != args.exclude_ids.end();
        });
        if (sites.empty()) throw qgk::data_error("--exclude-ids removed every site");
    }
    return sites;
}

qgk::KernelMatrix exact_kernel_for(const SitesArgs& args) {
    const auto [chrom, gene_cfg] = qgk::load_chromosome(args.chromosome_path);
    qgk::Dataset data = qgk::load_csv(args.data_path);
    data = qgk::rescale_unit_interval(std::move(data));
    if (static_cast<int>(data.feature_count) != gene_cfg.feature_count)
        throw qgk::data_error("chromosome/dataset feature count mismatch");
    return qgk::kernel_matrix(qgk::embed_all(chrom, gene_cfg, data, args.threads),
                              args.threads);
}

int cmd_sites_rank(const SitesArgs& args) {
    const qgk::BackendDescription desc = qgk::load_backend(args.backend_paths.at(0));
    const std::vector<qgk::Site> sites = sites_for(desc, args);
    const qgk::KernelMatrix exact = exact_kernel_for(args);

    std::vector<qgk::KernelMatrix> estimates;
    estimates.reserve(sites.size());
    for (const qgk::Site& s : sites)
        estimates.push_back(qgk::site_kernel(exact, s, args.shots, args.seed));
    std::vector<double> scores;
    scores.reserve(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i)
        scores.push_back(qgk::frobenius_score(estimates[i], exact));
    const std::vector<int> order = qgk::rank_sites(scores);

    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw qgk::data_error("cannot write file: " + args.out_path);
    out << "site_id,frobenius,excluded_rank\n";
    // excluded_rank: position in the worst-first exclusion order (0 = first
    // site dropped); the best-ranked site is excluded last.
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const int id = sites[static_cast<std::size_t>(order[pos])].id;
        out << id << "," << qgk::format_double(scores[static_cast<std::size_t>(order[pos])])
            << "," << (order.size() - 1 - pos) << "\n";
    }
    std::cout << "ranked " << sites.size() << " sites into " << args.out_path << "\n";
    return 0;
}

int cmd_sites_spread(const SitesArgs& args) {
    const qgk::BackendDescription desc = qgk::load_backend(args.backend_paths.at(0));
    const std::vector<qgk::Site> sites = sites_for(desc, args);
    const qgk::KernelMatrix exact = exact_kernel_for(args);

    std::vector<qgk::KernelMatrix> estimates;
    estimates.reserve(sites.size());
    for (const qgk::Site& s : sites)
        estimates.push_back(qgk::site_kernel(exact, s, args.shots, args.seed));
    const qgk::SiteReport report = qgk::spread_stats(estimates, exact);

    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw qgk::data_error("cannot write file: " + args.out_path);
    out << "excluded,average_spread\n";
    for (std::size_t e = 0; e < report.exclusion_curve.size(); ++e)
        out << e << "," << qgk::format_double(report.exclusion_curve[e]) << "\n";

    const std::size_t at = std::min<std::size_t>(
        static_cast<std::size_t>(args.exclude_worst),
        report.exclusion_curve.size() - 1);
    std::cout << "average spread (all sites): "
              << qgk::format_double(report.average_spread) << "\n";
    std::cout << "average spread (" << at << " worst excluded): "
              << qgk::format_double(report.exclusion_curve[at]) << "\n";
    return 0;
}

int cmd_sites_schedule(const SitesArgs& args) {
    std::vector<std::vector<qgk::Site>> per_backend;
    std::vector<std::string> names;
    for (const std::string& path : args.backend_paths) {
        const qgk::BackendDescription desc = qgk::load_backend(path);
        per_backend.push_back(sites_for(desc, args));
        names.push_back(desc.model.name);
    }
    if (args.population == 0) throw qgk::data_error("--population must be positive");
    const qgk::ScheduleResult sched =
        qgk::schedule_generation(args.population, per_backend);

    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw qgk::data_error("cannot write file: " + args.out_path);
    out << "backend,site_id,assigned\n";
    for (std::size_t s = 0; s < sched.batches.size(); ++s)
        out << names[sched.site_refs[s].first] << "," << sched.site_refs[s].second
            << "," << sched.batches[s].size() << "\n";
    std::cout << "sites: " << sched.batches.size()
              << ", wall-clock units: " << sched.wall_clock << ", speedup: "
              << qgk::format_double(static_cast<double>(args.population) /
                                    sched.wall_clock)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hardware-aware genetic optimization of quantum-kernel feature maps"};
    app.require_subcommand(1);

    GenDataArgs gen;
    CLI::App* gen_cmd = app.add_subcommand(
        "gen-data", "Generate a synthetic overlapping-class dataset CSV");
    gen_cmd->add_option("--samples", gen.samples, "Sample count (even)")->required();
    gen_cmd->add_option("--features", gen.features, "Feature count");
    gen_cmd->add_option("--bayes-accuracy", gen.bayes_accuracy,
                        "Target Bayes-optimal accuracy in [0.5, 1)");
    gen_cmd->add_option("--seed", gen.seed, "RNG seed")->required();
    gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

    OptimizeArgs opt;
    CLI::App* opt_cmd =
        app.add_subcommand("optimize", "Run the genetic feature-map search");
    opt_cmd->add_option("--config", opt.config_path, "Run config JSON")->required();
    opt_cmd->add_option("--data", opt.data_path, "Dataset CSV")->required();
    opt_cmd->add_option("--out", opt.out_dir, "Output directory");
    opt_cmd->add_option("--resume", opt.resume_dir,
                        "Existing output directory; exits clean if complete");
    opt_cmd->add_option("--backend", opt.backend_override,
                        "Backend JSON (overrides the config's path)");
    opt_cmd->add_option("--threads", opt.threads, "Worker threads");

    EvaluateArgs ev;
    CLI::App* ev_cmd =
        app.add_subcommand("evaluate", "Score one chromosome on a dataset");
    ev_cmd->add_option("--chromosome", ev.chromosome_path, "Chromosome JSON")
        ->required();
    ev_cmd->add_option("--data", ev.data_path, "Dataset CSV")->required();
    ev_cmd->add_option("--backend", ev.backend_path, "Backend JSON");
    ev_cmd->add_option("--noise", ev.noise, "Gaussian kernel noise std");
    long ev_shots = 0;
    ev_cmd->add_option("--shots", ev_shots, "Finite measurement shots");
    ev_cmd->add_option("--seed", ev.seed, "Noise RNG seed");
    ev_cmd->add_option("--svm-c", ev.svm_c, "SVM regularization");
    ev_cmd->add_option("--eta", ev.eta, "Sigma weight in the fitness");
    ev_cmd->add_option("--folds", ev.folds, "Cross-validation folds");
    ev_cmd->add_option("--out", ev.out_path, "Also write the JSON here");
    ev_cmd->add_option("--dump-kernel", ev.dump_kernel_path,
                       "Write the evaluated kernel matrix as CSV");
    ev_cmd->add_option("--threads", ev.threads, "Worker threads");

    SitesArgs st;
    CLI::App* sites_cmd =
        app.add_subcommand("sites", "Partitioned-QPU reports");
    sites_cmd->require_subcommand(1);
    CLI::App* rank_cmd =
        sites_cmd->add_subcommand("rank", "Frobenius-rank every site");
    CLI::App* spread_cmd =
        sites_cmd->add_subcommand("spread", "Across-site spread and exclusion curve");
    CLI::App* sched_cmd =
        sites_cmd->add_subcommand("schedule", "Round-robin generation scheduling");
    long st_shots = 0;
    for (CLI::App* sub : {rank_cmd, spread_cmd, sched_cmd}) {
        sub->add_option("--backend", st.backend_paths, "Backend JSON (repeatable)")
            ->required();
        sub->add_option("--sites-count", st.sites_count,
                        "Generate this many chain sites when the file lists none");
        sub->add_option("--noise-lo", st.noise_lo, "Log-uniform noise lower bound");
        sub->add_option("--noise-hi", st.noise_hi, "Log-uniform noise upper bound");
        sub->add_option("--seed", st.seed, "RNG seed");
        sub->add_option("--threads", st.threads, "Worker threads");
    }
    for (CLI::App* sub : {rank_cmd, spread_cmd}) {
        sub->add_option("--chromosome", st.chromosome_path, "Chromosome JSON")
            ->required();
        sub->add_option("--data", st.data_path, "Dataset CSV")->required();
        sub->add_option("--shots", st_shots, "Finite measurement shots");
        sub->add_option("--exclude-ids", st.exclude_ids,
                        "Site ids to drop before the analysis");
        sub->add_option("--out", st.out_path, "Output CSV")->required();
    }
    spread_cmd->add_option("--exclude-worst", st.exclude_worst,
                           "Report the spread with this many worst sites removed");
    sched_cmd->add_option("--population", st.population, "Evaluations to schedule")
        ->required();
    sched_cmd->add_option("--out", st.out_path, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*gen_cmd) {
            if (gen.samples % 2 != 0 || gen.samples == 0)
                throw CLI::ValidationError("--samples", "must be even and positive");
            if (!(gen.bayes_accuracy >= 0.5 && gen.bayes_accuracy < 1.0))
                throw CLI::ValidationError("--bayes-accuracy", "must lie in [0.5, 1)");
            return cmd_gen_data(gen);
        }
        if (*opt_cmd) {
            if (opt.out_dir.empty() && opt.resume_dir.empty())
                throw CLI::ValidationError("--out", "either --out or --resume required");
            return cmd_optimize(opt);
        }
        if (*ev_cmd) {
            if (ev_cmd->count("--shots") > 0) ev.shots = ev_shots;
            return cmd_evaluate(ev);
        }
        if (*sites_cmd) {
            for (CLI::App* sub : {rank_cmd, spread_cmd})
                if (*sub && sub->count("--shots") > 0) st.shots = st_shots;
            if (*rank_cmd) return cmd_sites_rank(st);
            if (*spread_cmd) return cmd_sites_spread(st);
            if (*sched_cmd) return cmd_sites_schedule(st);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qgk::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const qgk::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
