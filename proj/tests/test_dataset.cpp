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

#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qgk/dataset.hpp"

using namespace qgk;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("load_csv parses a small file and maps labels") {
    const std::string path = temp_path("qgk_small.csv");
    write_file(path,
               "f0,f1,label\n"
               "1.0,2.0,b\n"
               "1.5,2.5,b\n"
               "3.0,4.0,bb\n"
               "3.5,4.5,bb\n");
    const Dataset d = load_csv(path);
    REQUIRE(d.sample_count == 4);
    REQUIRE(d.feature_count == 2);
    CHECK(d.labels == std::vector<int>{-1, -1, +1, +1});
    CHECK(d.feature(0, 0) == 1.0);
    CHECK(d.feature(3, 1) == 4.5);
    std::remove(path.c_str());
}

TEST_CASE("load_csv error paths") {
    const std::string path = temp_path("qgk_bad.csv");
    CHECK_THROWS_AS(load_csv(temp_path("qgk_does_not_exist.csv")), data_error);

    write_file(path, "f0,label\n1.0,a\n2.0,a\n");
    CHECK_THROWS_WITH(load_csv(path), Catch::Contains("single-class"));

    write_file(path, "f0,label\n1.0,a\n2.0,b\n3.0,c\n");
    CHECK_THROWS_AS(load_csv(path), data_error);

    write_file(path, "f0,f1,label\n1.0,2.0,a\n1.0,b\n");
    CHECK_THROWS_WITH(load_csv(path), Catch::Contains("ragged"));

    write_file(path, "f0,label\nnot_a_number,a\n2.0,b\n");
    CHECK_THROWS_WITH(load_csv(path), Catch::Contains("non-numeric"));
    std::remove(path.c_str());
}

TEST_CASE("load_csv handles the statevector-subset scale") {
    const Dataset synth = synth_generate(500, 18, 0.5, 99);
    const std::string path = temp_path("qgk_500.csv");
    write_dataset_csv(synth, path);
    const Dataset back = load_csv(path);
    REQUIRE(back.sample_count == 500);
    REQUIRE(back.feature_count == 18);
    CHECK(back.labels == synth.labels);
    for (std::size_t i = 0; i < 20; ++i)
        CHECK(back.feature(i, i % 18) == synth.feature(i, i % 18));
    std::remove(path.c_str());
}

TEST_CASE("rescale maps columns onto [0,1]") {
    Dataset d;
    d.sample_count = 3;
    d.feature_count = 2;
    d.features = {2.0, 0.0, 4.0, 0.5, 6.0, 1.0};
    d.labels = {-1, +1, +1};
    const Dataset r = rescale_unit_interval(d);
    CHECK(r.feature(0, 0) == 0.0);
    CHECK(r.feature(1, 0) == 0.5);
    CHECK(r.feature(2, 0) == 1.0);
    // Second column already spans [0,1]: fixed point.
    CHECK(r.feature(0, 1) == 0.0);
    CHECK(r.feature(1, 1) == 0.5);
    CHECK(r.feature(2, 1) == 1.0);
}

TEST_CASE("constant column becomes 0.5 with a warning") {
    Dataset d;
    d.sample_count = 3;
    d.feature_count = 1;
    d.features = {3.0, 3.0, 3.0};
    d.labels = {-1, +1, +1};
    std::vector<std::string> warnings;
    const Dataset r = rescale_unit_interval(d, &warnings);
    CHECK(r.feature(0, 0) == 0.5);
    CHECK(r.feature(1, 0) == 0.5);
    CHECK(r.feature(2, 0) == 0.5);
    REQUIRE(warnings.size() == 1);
    CHECK_THAT(warnings[0], Catch::Contains("constant"));
}

TEST_CASE("rescale is idempotent") {
    const Dataset d = synth_generate(40, 5, 0.6, 3);
    const Dataset once = rescale_unit_interval(d);
    const Dataset twice = rescale_unit_interval(once);
    for (std::size_t i = 0; i < d.features.size(); ++i)
        CHECK(once.features[i] == twice.features[i]);
}

TEST_CASE("synth_generate hits the requested Bayes accuracy") {
    // Oracle: the closed-form Bayes rule sign(u . x_raw) applied to a large
    // draw; raw coordinates are recovered from the rescale metadata.
    SynthModel model;
    const Dataset d = synth_generate(100000, 18, 0.5, 42, &model);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.sample_count; ++i) {
        double score = 0.0;
        for (std::size_t f = 0; f < d.feature_count; ++f) {
            const double raw = model.column_lo[f] +
                               d.feature(i, f) * model.column_span[f];
            score += model.direction[f] * raw;
        }
        const int bayes = score >= 0.0 ? +1 : -1;
        if (bayes == d.labels[i]) ++correct;
    }
    const double acc = static_cast<double>(correct) /
                       static_cast<double>(d.sample_count);
    CHECK(acc > 0.74);
    CHECK(acc < 0.76);
}

TEST_CASE("full overlap makes classes indistinguishable") {
    SynthModel model;
    const Dataset d = synth_generate(2000, 4, 1.0, 7, &model);
    CHECK(model.separation == 0.0);
    // Any linear rule scores ~50%.
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.sample_count; ++i) {
        const int guess = d.feature(i, 0) >= 0.5 ? +1 : -1;
        if (guess == d.labels[i]) ++correct;
    }
    const double acc = static_cast<double>(correct) / 2000.0;
    CHECK(acc > 0.45);
    CHECK(acc < 0.55);
}

TEST_CASE("synth_generate is deterministic") {
    const Dataset a = synth_generate(100, 6, 0.4, 2024);
    const Dataset b = synth_generate(100, 6, 0.4, 2024);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    const Dataset c = synth_generate(100, 6, 0.4, 2025);
    CHECK(a.features != c.features);
}

TEST_CASE("synth_generate validates arguments") {
    CHECK_THROWS_AS(synth_generate(99, 4, 0.5, 1), data_error);
    CHECK_THROWS_AS(synth_generate(100, 4, 0.0, 1), data_error);
    CHECK_THROWS_AS(synth_generate(100, 4, 1.5, 1), data_error);
}

TEST_CASE("kfold_split is a stratified partition") {
    const Dataset d = synth_generate(100, 3, 0.5, 5);
    const FoldAssignment fa = kfold_split(d, 5, 11);
    REQUIRE(fa.fold_of.size() == 100);
    std::vector<int> per_fold(5, 0);
    std::vector<int> pos_per_fold(5, 0);
    for (std::size_t i = 0; i < 100; ++i) {
        REQUIRE(fa.fold_of[i] >= 0);
        REQUIRE(fa.fold_of[i] < 5);
        ++per_fold[static_cast<std::size_t>(fa.fold_of[i])];
        if (d.labels[i] > 0) ++pos_per_fold[static_cast<std::size_t>(fa.fold_of[i])];
    }
    for (int f = 0; f < 5; ++f) {
        CHECK(per_fold[static_cast<std::size_t>(f)] == 20);
        CHECK(pos_per_fold[static_cast<std::size_t>(f)] == 10);
    }
}

TEST_CASE("kfold_split with exactly one sample of each class per fold") {
    Dataset d;
    d.sample_count = 10;
    d.feature_count = 1;
    d.features.assign(10, 0.5);
    d.labels = {-1, +1, -1, +1, -1, +1, -1, +1, -1, +1};
    const FoldAssignment fa = kfold_split(d, 5, 3);
    std::vector<int> neg(5, 0), pos(5, 0);
    for (std::size_t i = 0; i < 10; ++i)
        (d.labels[i] < 0 ? neg : pos)[static_cast<std::size_t>(fa.fold_of[i])]++;
    for (int f = 0; f < 5; ++f) {
        CHECK(neg[static_cast<std::size_t>(f)] == 1);
        CHECK(pos[static_cast<std::size_t>(f)] == 1);
    }
}

TEST_CASE("kfold_split rejects classes smaller than k") {
    Dataset d;
    d.sample_count = 8;
    d.feature_count = 1;
    d.features.assign(8, 0.5);
    d.labels = {-1, -1, -1, -1, -1, +1, +1, +1};  // 5 + 3
    CHECK_THROWS_AS(kfold_split(d, 6, 1), data_error);
    CHECK_THROWS_AS(kfold_split(d, 4, 1), data_error);
    CHECK_NOTHROW(kfold_split(d, 3, 1));
}

TEST_CASE("kfold_split is seed-deterministic") {
    const Dataset d = synth_generate(60, 2, 0.5, 8);
    const FoldAssignment a = kfold_split(d, 5, 77);
    const FoldAssignment b = kfold_split(d, 5, 77);
    CHECK(a.fold_of == b.fold_of);
}
