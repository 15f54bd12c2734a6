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
// Feature/label container, CSV ingestion, unit-interval rescaling, a
// synthetic overlapping-class generator, and stratified k-fold splits.

#ifndef QGK_DATASET_HPP
#define QGK_DATASET_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qgk/common.hpp"
#include "qgk/rng.hpp"

namespace qgk {

/// Binary-labelled dataset, features stored row-major. Immutable by
/// convention after construction; safe to share across threads read-only.
struct Dataset {
    std::vector<double> features;  // n x F, row-major
    std::vector<int> labels;       // values in {-1, +1}
    std::size_t sample_count = 0;
    std::size_t feature_count = 0;

    double feature(std::size_t i, std::size_t f) const {
        return features[i * feature_count + f];
    }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * feature_count, feature_count};
    }
};

struct FoldAssignment {
    std::vector<int> fold_of;  // per-sample fold index in [0, fold_count)
    int fold_count = 0;
};

namespace detail {

inline double parse_double(const std::string& tok, std::size_t line_no) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw data_error("non-numeric cell '" + tok + "' at line " +
                         std::to_string(line_no));
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

/// Inverse standard-normal CDF (Acklam's rational approximation, polished
/// with one Halley step on erfc). Accurate to ~1e-14 over (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw data_error("quantile argument must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against the exact CDF.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

}  // namespace detail

/// Loads a header-row CSV: numeric feature columns plus one label column
/// with exactly two distinct raw values. The lexicographically smaller raw
/// label maps to -1. Features are NOT rescaled here.
inline Dataset load_csv(const std::string& path,
                        const std::string& label_column = "label") {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw data_error("empty file: " + path);
    const std::vector<std::string> header = detail::split_csv_line(line);
    std::ptrdiff_t label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) label_idx = static_cast<std::ptrdiff_t>(i);
    if (label_idx < 0)
        throw data_error("label column '" + label_column + "' not found");
    const std::size_t feature_count = header.size() - 1;
    if (feature_count == 0) throw data_error("no feature columns");

    std::vector<double> features;
    std::vector<std::string> raw_labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw data_error("ragged row at line " + std::to_string(line_no));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (static_cast<std::ptrdiff_t>(i) == label_idx) continue;
            features.push_back(detail::parse_double(cells[i], line_no));
        }
        raw_labels.push_back(cells[static_cast<std::size_t>(label_idx)]);
    }
    if (raw_labels.size() < 2) throw data_error("need at least 2 samples");

    std::vector<std::string> distinct = raw_labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() == 1) throw data_error("single-class dataset");
    if (distinct.size() > 2)
        throw data_error("label column has " + std::to_string(distinct.size()) +
                         " distinct values, expected 2");

    Dataset d;
    d.feature_count = feature_count;
    d.sample_count = raw_labels.size();
    d.features = std::move(features);
    d.labels.reserve(raw_labels.size());
    for (const std::string& s : raw_labels)
        d.labels.push_back(s == distinct[0] ? -1 : +1);
    return d;
}

/// Per-column min-max rescaling onto [0,1]. A constant column becomes 0.5
/// and a warning is appended (degenerate but usable downstream).
inline Dataset rescale_unit_interval(Dataset d,
                                     std::vector<std::string>* warnings = nullptr) {
    for (std::size_t f = 0; f < d.feature_count; ++f) {
        double lo = d.feature(0, f), hi = d.feature(0, f);
        for (std::size_t i = 1; i < d.sample_count; ++i) {
            lo = std::min(lo, d.feature(i, f));
            hi = std::max(hi, d.feature(i, f));
        }
        if (lo == hi) {
            for (std::size_t i = 0; i < d.sample_count; ++i)
                d.features[i * d.feature_count + f] = 0.5;
            if (warnings)
                warnings->push_back("column " + std::to_string(f) +
                                    " is constant; set to 0.5");
            continue;
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < d.sample_count; ++i) {
            double& v = d.features[i * d.feature_count + f];
            v = (v - lo) / span;
        }
    }
    return d;
}

/// Generative model parameters behind synth_generate, exposed so tests can
/// apply the closed-form Bayes rule to the produced samples.
struct SynthModel {
    std::vector<double> direction;      // unit vector u
    double separation = 0.0;            // Delta; class means at +-(Delta/2) u
    std::vector<double> column_lo;      // rescale offsets
    std::vector<double> column_span;    // rescale spans (0.0 marks a constant column)
};

/// Two equal-size classes from unit-covariance Gaussians separated by
/// Delta = 2 * Phi^-1(1 - overlap/2) along a random unit direction, then
/// min-max rescaled. overlap = 1 makes the classes indistinguishable.
inline Dataset synth_generate(std::size_t n, std::size_t feature_count,
                              double overlap, std::uint64_t seed,
                              SynthModel* model = nullptr) {
    if (n < 2 || n % 2 != 0) throw data_error("sample count must be even and >= 2");
    if (feature_count < 1) throw data_error("feature count must be >= 1");
    if (!(overlap > 0.0 && overlap <= 1.0))
        throw data_error("overlap must lie in (0, 1]");

    const double target_accuracy = 1.0 - overlap / 2.0;
    const double z = target_accuracy >= 1.0
                         ? 0.0
                         : detail::normal_quantile(target_accuracy);
    std::mt19937_64 rng = make_stream(seed, {0x5D});
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> u(feature_count);
    double un = 0.0;
    do {
        for (double& v : u) v = gauss(rng);
        un = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
    } while (un < 1e-12);
    for (double& v : u) v /= un;

    Dataset d;
    d.sample_count = n;
    d.feature_count = feature_count;
    d.features.resize(n * feature_count);
    d.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i < n / 2 ? -1 : +1;
        d.labels[i] = label;
        for (std::size_t f = 0; f < feature_count; ++f)
            d.features[i * feature_count + f] = gauss(rng) + label * z * u[f];
    }
    // Shuffle rows so classes are interleaved in file order.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Dataset shuffled = d;
    for (std::size_t i = 0; i < n; ++i) {
        shuffled.labels[i] = d.labels[perm[i]];
        for (std::size_t f = 0; f < feature_count; ++f)
            shuffled.features[i * feature_count + f] = d.feature(perm[i], f);
    }

    SynthModel m;
    m.direction = u;
    m.separation = 2.0 * z;
    m.column_lo.resize(feature_count);
    m.column_span.resize(feature_count);
    for (std::size_t f = 0; f < feature_count; ++f) {
        double lo = shuffled.feature(0, f), hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, shuffled.feature(i, f));
            hi = std::max(hi, shuffled.feature(i, f));
        }
        m.column_lo[f] = lo;
        m.column_span[f] = hi > lo ? hi - lo : 0.0;
    }
    if (model) *model = m;
    return rescale_unit_interval(std::move(shuffled));
}

/// Seed-deterministic stratified split: within each class, shuffled indices
/// are dealt round-robin, so per-fold class counts differ by at most 1.
inline FoldAssignment kfold_split(const Dataset& d, int k, std::uint64_t seed) {
    if (k < 2) throw data_error("fold count must be >= 2");
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < d.sample_count; ++i)
        (d.labels[i] < 0 ? neg : pos).push_back(i);
    if (static_cast<int>(neg.size()) < k || static_cast<int>(pos.size()) < k)
        throw data_error("each class needs at least k samples");

    FoldAssignment fa;
    fa.fold_count = k;
    fa.fold_of.assign(d.sample_count, -1);
    std::mt19937_64 rng = make_stream(seed, {0xF0});
    for (std::vector<std::size_t>* cls : {&neg, &pos}) {
        std::shuffle(cls->begin(), cls->end(), rng);
        for (std::size_t j = 0; j < cls->size(); ++j)
            fa.fold_of[(*cls)[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
    }
    return fa;
}

/// Writes the dataset in the external CSV contract: header row, features in
/// column order, final column `label` with values -1/1.
inline void write_dataset_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write file: " + path);
    for (std::size_t f = 0; f < d.feature_count; ++f) out << "f" << f << ",";
    out << "label\n";
    char buf[64];
    for (std::size_t i = 0; i < d.sample_count; ++i) {
        for (std::size_t f = 0; f < d.feature_count; ++f) {
            std::snprintf(buf, sizeof buf, "%.17g", d.feature(i, f));
            out << buf << ",";
        }
        out << d.labels[i] << "\n";
    }
    if (!out) throw data_error("write failed: " + path);
}

}  // namespace qgk

#endif  // QGK_DATASET_HPP
