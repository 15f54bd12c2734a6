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
// Partitioned-QPU execution model: 4-qubit directional-chain sites carved
// out of a backend, per-site noisy kernel estimates, Frobenius-norm site
// ranking, across-site spread statistics with worst-first exclusion, and
// generation-level scheduling.
//
// Noise is modeled at the kernel-entry level (binomial shot sampling plus
// zero-mean Gaussian), the same abstraction used to decide when the genetic
// search survives hardware noise.

#ifndef QGK_QPU_SIM_HPP
#define QGK_QPU_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qgk/common.hpp"
#include "qgk/kernel.hpp"
#include "qgk/rng.hpp"
#include "qgk/transpile.hpp"

namespace qgk {

/// One independent sub-unit of a QPU. The canonical pattern is the 4-qubit
/// directional chain q0 -> q1 -> q2 <- q3.
struct Site {
    int id = 0;
    std::vector<int> qubits;
    std::vector<std::pair<int, int>> edges;  // internal, (control, target)
    double noise_scale = 0.0;
    double bias = 0.0;
};

struct SiteReport {
    std::vector<double> frobenius;       // per site, input order
    std::vector<int> ranking;            // site ids, ascending score
    std::vector<double> per_entry_std;   // across-site std, packed strict upper
    double average_spread = 0.0;         // mean across-site std over entries
    std::vector<double> exclusion_curve; // avg spread vs #worst sites excluded
};

struct NoiseProfile {
    std::vector<double> explicit_scales;  // used verbatim when non-empty
    double log_uniform_lo = 0.0;
    double log_uniform_hi = 0.0;
};

/// Carves `count` four-qubit directional-chain sites out of the backend and
/// assigns noise scales from the profile (explicit list or log-uniform).
inline std::vector<Site> build_sites(const BackendModel& backend, int count,
                                     const NoiseProfile& profile,
                                     std::uint64_t seed) {
    if (count < 1) throw data_error("site count must be >= 1");
    if (4 * count > backend.qubit_count)
        throw data_error("backend too small for " + std::to_string(count) +
                         " four-qubit sites");
    const bool explicit_scales = !profile.explicit_scales.empty();
    if (explicit_scales &&
        static_cast<int>(profile.explicit_scales.size()) != count)
        throw data_error("explicit noise list length does not match site count");
    if (!explicit_scales &&
        !(profile.log_uniform_lo > 0.0 &&
          profile.log_uniform_hi >= profile.log_uniform_lo))
        throw data_error("log-uniform noise bounds must satisfy 0 < lo <= hi");

    std::vector<Site> sites(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        Site& site = sites[static_cast<std::size_t>(s)];
        site.id = s;
        const int base = 4 * s;
        site.qubits = {base, base + 1, base + 2, base + 3};
        // Directional chain -> -> <-.
        site.edges = {{base, base + 1}, {base + 1, base + 2}, {base + 3, base + 2}};
        if (explicit_scales) {
            site.noise_scale = profile.explicit_scales[static_cast<std::size_t>(s)];
        } else {
            std::mt19937_64 rng =
                make_stream(seed, {0x517E, static_cast<std::uint64_t>(s)});
            std::uniform_real_distribution<double> u(std::log(profile.log_uniform_lo),
                                                     std::log(profile.log_uniform_hi));
            site.noise_scale = std::exp(u(rng));
        }
    }
    return sites;
}

/// Kernel estimate the site would report: optional shot sampling, then
/// Gaussian noise of the site's scale, clamped and mirrored. Entry streams
/// are keyed by (site id, i, j), so any evaluation order gives the same
/// matrix.
inline KernelMatrix site_kernel(const KernelMatrix& exact, const Site& site,
                                std::optional<long> shots, std::uint64_t seed) {
    return noisy_kernel(exact, shots, site.noise_scale, site.bias,
                        derive_seed(seed, {0x5173, static_cast<std::uint64_t>(site.id)}));
}

/// Frobenius norm of (site kernel - exact kernel) over the full matrix.
inline double frobenius_score(const KernelMatrix& site, const KernelMatrix& exact) {
    if (site.size() != exact.size()) throw data_error("kernel shape mismatch");
    double sum = 0.0;
    const auto a = site.upper();
    const auto b = exact.upper();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += 2.0 * d * d;  // each off-diagonal entry appears twice
    }
    return std::sqrt(sum);
}

/// Site order of ascending Frobenius score; ties resolve by site id.
inline std::vector<int> rank_sites(std::span<const double> scores) {
    if (scores.empty()) throw data_error("rank_sites: no scores");
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)];
    });
    return order;
}

namespace detail {

/// Across-site population std per strict-upper entry, restricted to the
/// selected site subset.
inline std::vector<double> entry_spreads(const std::vector<KernelMatrix>& estimates,
                                         std::span<const std::size_t> subset) {
    const std::size_t entries = estimates[0].upper().size();
    std::vector<double> out(entries, 0.0);
    if (subset.size() < 2) return out;
    for (std::size_t e = 0; e < entries; ++e) {
        double mean = 0.0;
        for (std::size_t s : subset) mean += estimates[s].upper()[e];
        mean /= static_cast<double>(subset.size());
        double var = 0.0;
        for (std::size_t s : subset) {
            const double d = estimates[s].upper()[e] - mean;
            var += d * d;
        }
        out[e] = std::sqrt(var / static_cast<double>(subset.size()));
    }
    return out;
}

inline double average_spread(const std::vector<KernelMatrix>& estimates,
                             std::span<const std::size_t> subset) {
    if (subset.size() < 2) return 0.0;
    const std::vector<double> spreads = entry_spreads(estimates, subset);
    double total = 0.0;
    for (double s : spreads) total += s;
    return total / static_cast<double>(spreads.size());
}

}  // namespace detail

/// Across-site spread statistics and the worst-first exclusion curve:
/// element e is the average spread after removing the e worst sites by
/// Frobenius score. The final element (single site left) is zero.
inline SiteReport spread_stats(const std::vector<KernelMatrix>& site_kernels,
                               const KernelMatrix& exact) {
    if (site_kernels.size() < 2) throw data_error("spread needs at least 2 sites");
    SiteReport report;
    report.frobenius.reserve(site_kernels.size());
    for (const KernelMatrix& k : site_kernels)
        report.frobenius.push_back(frobenius_score(k, exact));
    report.ranking = rank_sites(report.frobenius);

    // Best-to-worst order; the suffix after dropping e worst sites is the
    // first (S - e) entries.
    std::vector<std::size_t> keep(report.ranking.begin(), report.ranking.end());
    report.per_entry_std = detail::entry_spreads(site_kernels, keep);
    report.exclusion_curve.resize(site_kernels.size());
    for (std::size_t e = 0; e < site_kernels.size(); ++e) {
        const std::span<const std::size_t> subset(keep.data(),
                                                  site_kernels.size() - e);
        report.exclusion_curve[e] = detail::average_spread(site_kernels, subset);
    }
    report.average_spread = report.exclusion_curve[0];
    return report;
}

/// The ceil(fraction * count) best-ranked sites, in rank order.
inline std::vector<Site> retain_top_fraction(const std::vector<Site>& sites,
                                             std::span<const double> scores,
                                             double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw data_error("fraction must lie in (0, 1]");
    if (scores.size() != sites.size()) throw data_error("score count mismatch");
    const std::vector<int> order = rank_sites(scores);
    const auto keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(sites.size())));
    std::vector<Site> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i)
        out.push_back(sites[static_cast<std::size_t>(order[i])]);
    return out;
}

struct ScheduleResult {
    // assignment[k] = flattened site index for chromosome evaluation k.
    std::vector<std::size_t> assignment;
    // batches[s] = chromosome evaluations placed on flattened site s.
    std::vector<std::vector<std::size_t>> batches;
    std::vector<std::pair<std::size_t, int>> site_refs;  // (backend idx, site id)
    double per_kernel_cost = 1.0;
    double wall_clock = 0.0;  // max site load * per-kernel cost
};

/// Round-robin assignment of one generation's evaluations across every site
/// of every backend; wall clock is the busiest site's batch cost.
inline ScheduleResult schedule_generation(
    std::size_t population, const std::vector<std::vector<Site>>& backends,
    double per_kernel_cost = 1.0) {
    ScheduleResult res;
    res.per_kernel_cost = per_kernel_cost;
    for (std::size_t b = 0; b < backends.size(); ++b)
        for (const Site& s : backends[b]) res.site_refs.emplace_back(b, s.id);
    if (res.site_refs.empty()) throw data_error("schedule: no sites available");
    res.batches.resize(res.site_refs.size());
    res.assignment.resize(population);
    for (std::size_t k = 0; k < population; ++k) {
        const std::size_t s = k % res.site_refs.size();
        res.assignment[k] = s;
        res.batches[s].push_back(k);
    }
    std::size_t max_load = 0;
    for (const auto& b : res.batches) max_load = std::max(max_load, b.size());
    res.wall_clock = static_cast<double>(max_load) * per_kernel_cost;
    return res;
}

}  // namespace qgk

#endif  // QGK_QPU_SIM_HPP
