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
// Fidelity quantum kernel: K[i][j] = |<phi(x_i)|phi(x_j)>|^2, its
// off-diagonal dispersion, and finite-shot / Gaussian-noise estimates.
//
// Kernels are evaluated by caching one statevector per sample (n circuit
// runs) instead of running the n^2 compute-uncompute circuits; the naive
// route is kept as a test oracle.

#ifndef QGK_KERNEL_HPP
#define QGK_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qgk/circuit.hpp"
#include "qgk/common.hpp"
#include "qgk/dataset.hpp"
#include "qgk/genome.hpp"
#include "qgk/rng.hpp"

namespace qgk {

/// Symmetric Gram matrix with unit diagonal. Only the strict upper triangle
/// is stored, so symmetry holds by construction.
class KernelMatrix {
  public:
    KernelMatrix() = default;
    explicit KernelMatrix(std::size_t n)
        : n_(n), upper_(n * (n - 1) / 2, 0.0) {}

    std::size_t size() const { return n_; }

    double at(std::size_t i, std::size_t j) const {
        if (i == j) return 1.0;
        return upper_[pack(i, j)];
    }

    void set(std::size_t i, std::size_t j, double v) {
        if (i == j) throw data_error("kernel diagonal is fixed at 1");
        upper_[pack(i, j)] = v;
    }

    std::span<const double> upper() const { return upper_; }
    std::span<double> upper() { return upper_; }

    /// Restriction to the given sample indices (order preserved).
    KernelMatrix subset(std::span<const std::size_t> idx) const {
        KernelMatrix out(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = i + 1; j < idx.size(); ++j)
                out.set(i, j, at(idx[i], idx[j]));
        return out;
    }

  private:
    std::size_t pack(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return i * n_ - i * (i + 1) / 2 + (j - i - 1);
    }

    std::size_t n_ = 0;
    std::vector<double> upper_;
};

/// One encoded statevector per dataset row: |phi(x_i)> = U(x_i)|0...0>.
inline std::vector<Statevector> embed_all(const Chromosome& c, const GeneConfig& cfg,
                                          const Dataset& d, unsigned threads = 1) {
    std::vector<Statevector> states(d.sample_count);
    parallel_for(d.sample_count, threads, [&](std::size_t i) {
        states[i] = run_statevector(decode(c, cfg, d.row(i)));
    });
    return states;
}

inline KernelMatrix kernel_matrix(std::span<const Statevector> states,
                                  unsigned threads = 1) {
    if (states.size() < 2) throw data_error("kernel needs at least 2 states");
    for (const Statevector& s : states)
        if (s.amps.size() != states[0].amps.size())
            throw data_error("statevector dimension mismatch");
    KernelMatrix k(states.size());
    parallel_for(states.size(), threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < states.size(); ++j)
            k.set(i, j, std::norm(inner_product(states[i], states[j])));
    });
    return k;
}

/// Population standard deviation of the strict upper triangle.
inline double offdiag_std(const KernelMatrix& k) {
    if (k.size() < 3) throw data_error("offdiag_std needs at least 3 samples");
    const auto vals = k.upper();
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size());
    return std::sqrt(var);
}

/// Frequency of the all-zeros outcome over `shots` runs of the
/// compute-uncompute fidelity circuit: Binomial(shots, p) / shots.
inline double shot_estimate(double p, long shots, std::mt19937_64& rng) {
    if (shots <= 0) throw data_error("shots must be positive");
    if (p < 0.0 || p > 1.0) throw data_error("probability out of [0,1]");
    std::binomial_distribution<long> dist(shots, p);
    return static_cast<double>(dist(rng)) / static_cast<double>(shots);
}

/// Noisy re-estimate of a kernel matrix: per strict-upper entry, an optional
/// binomial shot draw followed by additive Gaussian noise and a constant
/// bias, clamped to [0,1] and mirrored. One substream per (i, j) keyed off
/// `stream_seed`, so the result is independent of evaluation order.
inline KernelMatrix noisy_kernel(const KernelMatrix& exact,
                                 std::optional<long> shots, double gauss_sigma,
                                 double bias, std::uint64_t stream_seed) {
    KernelMatrix out(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
        for (std::size_t j = i + 1; j < exact.size(); ++j) {
            double v = exact.at(i, j);
            std::mt19937_64 rng = make_stream(stream_seed, {i, j});
            if (shots) v = shot_estimate(v, *shots, rng);
            if (gauss_sigma > 0.0) {
                std::normal_distribution<double> g(0.0, gauss_sigma);
                v += g(rng);
            }
            v += bias;
            out.set(i, j, std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

inline void write_kernel_csv(const KernelMatrix& k, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write file: " + path);
    char buf[64];
    for (std::size_t i = 0; i < k.size(); ++i) {
        for (std::size_t j = 0; j < k.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", k.at(i, j));
            out << buf << (j + 1 < k.size() ? "," : "\n");
        }
    }
}

}  // namespace qgk

#endif  // QGK_KERNEL_HPP
