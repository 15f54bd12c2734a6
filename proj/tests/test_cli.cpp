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
// End-to-end checks against the built CLI binary (path injected by CMake).

#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qgk/io.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kCli = QGK_CLI_PATH;

struct CmdResult {
    int exit_code = -1;
    std::string output;
};

CmdResult run_cmd(const std::string& args) {
    const std::string out_file =
        (fs::temp_directory_path() / "qgk_cli_out.txt").string();
    const std::string cmd = kCli + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    CmdResult res;
    res.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "qgk_cli_tests";
    fs::create_directories(dir);
    return dir;
}

/// Small shared fixture: dataset, chain backend, chromosome, run config.
struct Fixture {
    fs::path dir = work_dir();
    std::string data = (dir / "data.csv").string();
    std::string backend = (dir / "backend.json").string();
    std::string chromosome = (dir / "chromosome.json").string();
    std::string config = (dir / "run.json").string();

    Fixture() {
        run_cmd("gen-data --samples 40 --features 4 --bayes-accuracy 0.8 --seed 5 "
                "--out " + data);

        qgk::BackendDescription desc;
        desc.model.name = "chain4";
        desc.model.qubit_count = 4;
        desc.model.basis_gates = {qgk::GateKind::I, qgk::GateKind::RZ,
                                  qgk::GateKind::SX, qgk::GateKind::X,
                                  qgk::GateKind::ECR};
        desc.model.edges = {{0, 1}, {1, 2}, {3, 2}};
        qgk::save_backend(desc, backend);

        qgk::GeneConfig gene;
        gene.qubit_count = 4;
        gene.circuit_size = 2;
        gene.feature_count = 4;
        gene.allowed_gates = {qgk::GateKind::I, qgk::GateKind::H, qgk::GateKind::RY,
                              qgk::GateKind::RZ, qgk::GateKind::CX};
        std::mt19937_64 rng = qgk::make_stream(77);
        qgk::save_chromosome(qgk::random_chromosome(gene, rng), gene, chromosome);

        qgk::json cfg;
        cfg["population"] = 6;
        cfg["generations"] = 4;
        cfg["parent_count"] = 3;
        cfg["elite_count"] = 1;
        cfg["mutation_rate"] = 0.05;
        cfg["crossover_prob"] = 0.9;
        cfg["objective"] = "mono";
        cfg["seed"] = 11;
        cfg["qubits"] = 4;
        cfg["circuit_size"] = 2;
        cfg["allowed_gates"] = {"I", "H", "RY", "RZ", "CX"};
        cfg["folds"] = 4;
        cfg["backend"] = backend;
        qgk::detail::write_text_file(config, cfg.dump(2) + "\n");
    }
};

}  // namespace

TEST_CASE("gen-data is byte-reproducible and validates flags") {
    const fs::path dir = work_dir();
    const std::string a = (dir / "gen_a.csv").string();
    const std::string b = (dir / "gen_b.csv").string();
    CHECK(run_cmd("gen-data --samples 40 --features 3 --seed 9 --out " + a)
              .exit_code == 0);
    CHECK(run_cmd("gen-data --samples 40 --features 3 --seed 9 --out " + b)
              .exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    CHECK(run_cmd("gen-data --samples 3 --seed 1 --out " + a).exit_code == 2);
    CHECK(run_cmd("gen-data --samples 40 --bayes-accuracy 1.5 --seed 1 --out " + a)
              .exit_code == 2);
    CHECK(run_cmd("gen-data --samples 40 --seed 1").exit_code == 2);  // missing --out
}

TEST_CASE("optimize produces reports, a manifest, and resumes cleanly") {
    Fixture fx;
    const std::string out = (fx.dir / "run_out").string();
    fs::remove_all(out);
    const CmdResult first = run_cmd("optimize --config " + fx.config + " --data " +
                                    fx.data + " --out " + out);
    INFO(first.output);
    REQUIRE(first.exit_code == 0);
    CHECK(fs::exists(fs::path(out) / "generations.csv"));
    CHECK(fs::exists(fs::path(out) / "best_chromosome.json"));
    const auto manifest =
        qgk::try_load_manifest((fs::path(out) / "manifest.json").string());
    REQUIRE(manifest.has_value());
    CHECK(manifest->status == "complete");
    CHECK(manifest->config_snapshot == slurp(fx.config));

    // Resuming a finished run is a no-op with exit 0.
    const CmdResult resumed = run_cmd("optimize --config " + fx.config + " --data " +
                                      fx.data + " --resume " + out);
    CHECK(resumed.exit_code == 0);
    CHECK_THAT(resumed.output, Catch::Contains("already complete"));

    // Re-running into the same --out without --resume is refused.
    CHECK(run_cmd("optimize --config " + fx.config + " --data " + fx.data +
                  " --out " + out)
              .exit_code == 0);  // identical config: treated as complete
}

TEST_CASE("optimize is byte-identical across thread counts") {
    Fixture fx;
    const std::string out1 = (fx.dir / "thr1").string();
    const std::string out8 = (fx.dir / "thr8").string();
    fs::remove_all(out1);
    fs::remove_all(out8);
    REQUIRE(run_cmd("optimize --config " + fx.config + " --data " + fx.data +
                    " --out " + out1 + " --threads 1")
                .exit_code == 0);
    REQUIRE(run_cmd("optimize --config " + fx.config + " --data " + fx.data +
                    " --out " + out8 + " --threads 8")
                .exit_code == 0);
    CHECK(slurp((fs::path(out1) / "generations.csv").string()) ==
          slurp((fs::path(out8) / "generations.csv").string()));
    CHECK(slurp((fs::path(out1) / "best_chromosome.json").string()) ==
          slurp((fs::path(out8) / "best_chromosome.json").string()));
}

TEST_CASE("optimize maps missing files to the data-error exit code") {
    Fixture fx;
    CHECK(run_cmd("optimize --config " + fx.config +
                  " --data /nonexistent.csv --out " + (fx.dir / "x").string())
              .exit_code == 3);
    CHECK(run_cmd("optimize --config /nonexistent.json --data " + fx.data +
                  " --out " + (fx.dir / "x").string())
              .exit_code == 3);
}

TEST_CASE("evaluate prints deterministic JSON") {
    Fixture fx;
    const std::string cmd = "evaluate --chromosome " + fx.chromosome + " --data " +
                            fx.data + " --backend " + fx.backend + " --folds 4";
    const CmdResult a = run_cmd(cmd);
    INFO(a.output);
    REQUIRE(a.exit_code == 0);
    CHECK_THAT(a.output, Catch::Contains("\"accuracy\""));
    CHECK_THAT(a.output, Catch::Contains("\"sigma\""));
    CHECK_THAT(a.output, Catch::Contains("\"depth\""));
    CHECK_THAT(a.output, Catch::Contains("\"fitness\""));
    const CmdResult b = run_cmd(cmd);
    CHECK(a.output == b.output);

    // Seeded noise: identical across invocations too.
    const CmdResult n1 = run_cmd(cmd + " --noise 0.01 --seed 3");
    const CmdResult n2 = run_cmd(cmd + " --noise 0.01 --seed 3");
    REQUIRE(n1.exit_code == 0);
    CHECK(n1.output == n2.output);
    CHECK(n1.output != a.output);
}

TEST_CASE("evaluate rejects mismatched chromosome and data") {
    Fixture fx;
    const std::string wide = (fx.dir / "wide.csv").string();
    run_cmd("gen-data --samples 20 --features 7 --seed 2 --out " + wide);
    const CmdResult res = run_cmd("evaluate --chromosome " + fx.chromosome +
                                  " --data " + wide);
    CHECK(res.exit_code == 3);
    CHECK_THAT(res.output, Catch::Contains("features"));
}

TEST_CASE("sites rank emits an ascending CSV") {
    Fixture fx;
    const std::string wide_backend = (fx.dir / "wide_backend.json").string();
    qgk::BackendDescription desc;
    desc.model.name = "wide";
    desc.model.qubit_count = 88;
    desc.model.basis_gates = {qgk::GateKind::I, qgk::GateKind::RZ, qgk::GateKind::SX,
                              qgk::GateKind::X, qgk::GateKind::ECR};
    for (int q = 0; q + 1 < 88; ++q) desc.model.edges.emplace_back(q, q + 1);
    qgk::save_backend(desc, wide_backend);

    const std::string out = (fx.dir / "rank.csv").string();
    const CmdResult res = run_cmd(
        "sites rank --backend " + wide_backend + " --chromosome " + fx.chromosome +
        " --data " + fx.data + " --sites-count 21 --noise-lo 0.005 --noise-hi 0.05 "
        "--seed 4 --out " + out);
    INFO(res.output);
    REQUIRE(res.exit_code == 0);

    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "site_id,frobenius,excluded_rank");
    double prev = -1.0;
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double frob = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(frob >= prev);
        prev = frob;
        ++rows;
    }
    CHECK(rows == 21);
}

TEST_CASE("sites spread writes the exclusion curve") {
    Fixture fx;
    const std::string wide_backend = (fx.dir / "wide_backend2.json").string();
    qgk::BackendDescription desc;
    desc.model.name = "wide2";
    desc.model.qubit_count = 48;
    desc.model.basis_gates = {qgk::GateKind::I, qgk::GateKind::RZ, qgk::GateKind::SX,
                              qgk::GateKind::X, qgk::GateKind::ECR};
    for (int q = 0; q + 1 < 48; ++q) desc.model.edges.emplace_back(q, q + 1);
    qgk::save_backend(desc, wide_backend);

    const std::string out = (fx.dir / "spread.csv").string();
    const CmdResult res = run_cmd(
        "sites spread --backend " + wide_backend + " --chromosome " + fx.chromosome +
        " --data " + fx.data + " --sites-count 12 --noise-lo 0.005 --noise-hi 0.08 "
        "--seed 4 --exclude-worst 6 --out " + out);
    INFO(res.output);
    REQUIRE(res.exit_code == 0);
    CHECK_THAT(res.output, Catch::Contains("6 worst excluded"));
    std::ifstream in(out);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 13);  // header + one row per exclusion level
}

TEST_CASE("sites schedule balances two backends") {
    Fixture fx;
    auto make_backend = [&](const std::string& name, int qubits) {
        qgk::BackendDescription desc;
        desc.model.name = name;
        desc.model.qubit_count = qubits;
        desc.model.basis_gates = {qgk::GateKind::I, qgk::GateKind::RZ,
                                  qgk::GateKind::SX, qgk::GateKind::X,
                                  qgk::GateKind::ECR};
        for (int q = 0; q + 1 < qubits; ++q) desc.model.edges.emplace_back(q, q + 1);
        const std::string path = (fx.dir / (name + ".json")).string();
        qgk::save_backend(desc, path);
        return path;
    };
    const std::string b1 = make_backend("b19", 76);
    const std::string b2 = make_backend("b21", 84);
    const std::string out = (fx.dir / "sched.csv").string();
    const CmdResult res = run_cmd(
        "sites schedule --backend " + b1 + " --backend " + b2 +
        " --sites-count 19 --noise-lo 0.01 --noise-hi 0.02 --population 45 --out " +
        out);
    INFO(res.output);
    REQUIRE(res.exit_code == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "backend,site_id,assigned");
    int rows = 0;
    while (std::getline(in, line)) {
        const auto last = line.rfind(',');
        const int assigned = std::stoi(line.substr(last + 1));
        CHECK(assigned >= 1);
        CHECK(assigned <= 2);
        ++rows;
    }
    CHECK(rows == 38);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cmd("no-such-command").exit_code == 2);
    CHECK(run_cmd("optimize").exit_code == 2);
    CHECK(run_cmd("sites rank").exit_code == 2);
}
