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
// Integer-gene encoding of feature-map circuits.
//
// Each gate slot is a block of six genes:
//   0: gate type, index into the allowed-gate alphabet
//   1: transformation selector T in [0,2]
//   2: multi-feature flag MF in [0,1]
//   3: first feature index in [0, F)
//   4: second feature index in [0, F)
//   5: encoded second-qubit index in [0, Q-2] (skip-map over the acting qubit)
//
// Non-parametric single-qubit gates ignore genes 1-5; the identity gate
// contributes nothing, so circuits can evolve to fewer than Q*S gates.

#ifndef QGK_GENOME_HPP
#define QGK_GENOME_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qgk/circuit.hpp"
#include "qgk/common.hpp"

namespace qgk {

enum class BlockOrder {
    layer_major,  // block g acts on qubit g % Q at layer g / Q (default)
    qubit_major,  // block g acts on qubit g / S at layer g % S
};

struct GeneConfig {
    int qubit_count = 0;
    int circuit_size = 0;  // S
    int feature_count = 0;
    std::vector<GateKind> allowed_gates;
    // When set, two-qubit targets are remapped onto directly connected
    // neighbors (edges are taken as undirected for placement purposes).
    std::optional<std::vector<std::pair<int, int>>> connectivity;
    BlockOrder block_order = BlockOrder::layer_major;

    int gene_length() const { return 6 * qubit_count * circuit_size; }
    int block_count() const { return qubit_count * circuit_size; }

    void validate() const {
        if (qubit_count < 2) throw data_error("gene config: need at least 2 qubits");
        if (circuit_size < 1) throw data_error("gene config: circuit_size must be >= 1");
        if (feature_count < 1) throw data_error("gene config: feature_count must be >= 1");
        if (allowed_gates.empty()) throw data_error("gene config: empty gate alphabet");
        if (connectivity) {
            std::vector<int> degree(static_cast<std::size_t>(qubit_count), 0);
            for (auto [a, b] : *connectivity) {
                if (a < 0 || b < 0 || a >= qubit_count || b >= qubit_count || a == b)
                    throw data_error("gene config: invalid connectivity edge");
                ++degree[static_cast<std::size_t>(a)];
                ++degree[static_cast<std::size_t>(b)];
            }
            for (int q = 0; q < qubit_count; ++q)
                if (degree[static_cast<std::size_t>(q)] == 0)
                    throw data_error("gene config: qubit " + std::to_string(q) +
                                     " has no connectivity edge");
        }
    }

    /// Inclusive upper bound of the gene at `pos` (0-5) within a block.
    int gene_max(int pos) const {
        switch (pos) {
            case 0: return static_cast<int>(allowed_gates.size()) - 1;
            case 1: return 2;
            case 2: return 1;
            case 3:
            case 4: return feature_count - 1;
            case 5: return qubit_count - 2;
            default: throw data_error("gene position out of range");
        }
    }

    /// Sorted undirected neighbor list of qubit q under `connectivity`.
    std::vector<int> neighbors(int q) const {
        std::vector<int> out;
        if (!connectivity) return out;
        for (auto [a, b] : *connectivity) {
            if (a == q) out.push_back(b);
            if (b == q) out.push_back(a);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

struct Chromosome {
    std::vector<int> genes;

    bool operator==(const Chromosome& o) const { return genes == o.genes; }
};

inline void validate_chromosome(const Chromosome& c, const GeneConfig& cfg) {
    if (static_cast<int>(c.genes.size()) != cfg.gene_length())
        throw data_error("chromosome length mismatch: expected " +
                         std::to_string(cfg.gene_length()) + ", got " +
                         std::to_string(c.genes.size()));
    for (std::size_t i = 0; i < c.genes.size(); ++i) {
        const int pos = static_cast<int>(i % 6);
        if (c.genes[i] < 0 || c.genes[i] > cfg.gene_max(pos))
            throw data_error("gene " + std::to_string(i) + " out of range");
    }
}

inline Chromosome random_chromosome(const GeneConfig& cfg, std::mt19937_64& rng) {
    Chromosome c;
    c.genes.resize(static_cast<std::size_t>(cfg.gene_length()));
    for (std::size_t i = 0; i < c.genes.size(); ++i) {
        const int pos = static_cast<int>(i % 6);
        std::uniform_int_distribution<int> dist(0, cfg.gene_max(pos));
        c.genes[i] = dist(rng);
    }
    return c;
}

/// Gate-argument transformations selected by the T and MF genes. MF=0 cells
/// use only xi. Outputs lie in [-4*pi, 4*pi]; see the (T=1, MF=1) cell,
/// which peaks at 4*pi for xi = xj = 0.
inline double transform_angle(int t, int mf, double xi, double xj = 0.0) {
    constexpr double pi = 3.14159265358979323846;
    if (t < 0 || t > 2 || mf < 0 || mf > 1)
        throw data_error("transform selector out of range");
    if (xi < 0.0 || xi > 1.0 || xj < 0.0 || xj > 1.0)
        throw data_error("transform_angle inputs must lie in [0,1]");
    switch (t * 2 + mf) {
        case 0: return 2.0 * pi * (xi - 0.5);
        case 1: return 2.0 * pi * xi * (1.0 - xj) - pi;
        case 2: return 2.0 * pi * (xi - 0.5) * (1.0 - xi) - pi;
        case 3:
            return (2.0 * pi * (xi - 0.5) * (1.0 - xj) - pi) *
                   (2.0 * pi * (xj - 0.5) * (1.0 - xi) - pi) / pi;
        case 4: return 2.0 * std::asin(2.0 * xi - 1.0) - pi;
        case 5: return 2.0 * std::asin((2.0 * xi - 1.0) * (2.0 * xj - 1.0)) - pi;
        default: return 0.0;  // unreachable
    }
}

namespace detail {

/// Maps gene 5 to a concrete target qubit. Without connectivity, the skip-map
/// guarantees target != acting qubit; with connectivity, the target is the
/// (gene5 mod degree)-th sorted neighbor of the acting qubit.
inline int decode_target(int acting, int gene5, const GeneConfig& cfg) {
    if (cfg.connectivity) {
        const std::vector<int> nb = cfg.neighbors(acting);
        if (nb.empty()) throw data_error("acting qubit has no connected neighbor");
        return nb[static_cast<std::size_t>(gene5) % nb.size()];
    }
    return gene5 < acting ? gene5 : gene5 + 1;
}

}  // namespace detail

/// Decodes a chromosome into a circuit for one feature vector. Angles are
/// evaluated per sample at decode time; the circuit structure depends only
/// on the genes.
inline Circuit decode(const Chromosome& c, const GeneConfig& cfg,
                      std::span<const double> x) {
    if (static_cast<int>(x.size()) != cfg.feature_count)
        throw data_error("feature vector length mismatch");
    Circuit out;
    out.qubit_count = cfg.qubit_count;
    out.gates.reserve(static_cast<std::size_t>(cfg.block_count()));
    for (int g = 0; g < cfg.block_count(); ++g) {
        const int* b = c.genes.data() + 6 * g;
        const GateKind kind = cfg.allowed_gates[static_cast<std::size_t>(b[0])];
        if (kind == GateKind::I) continue;
        const int acting = cfg.block_order == BlockOrder::layer_major
                               ? g % cfg.qubit_count
                               : g / cfg.circuit_size;
        GateInstance gi;
        gi.kind = kind;
        gi.qubit0 = acting;
        if (is_two_qubit(kind)) gi.qubit1 = detail::decode_target(acting, b[5], cfg);
        if (is_parametric(kind)) {
            const double xi = x[static_cast<std::size_t>(b[3])];
            const double xj = b[2] == 1 ? x[static_cast<std::size_t>(b[4])] : 0.0;
            gi.angle = transform_angle(b[1], b[2], xi, xj);
        }
        out.gates.push_back(gi);
    }
    return out;
}

}  // namespace qgk

#endif  // QGK_GENOME_HPP
