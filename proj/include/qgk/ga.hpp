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
// The genetic engine: population lifecycle, steady-state and NSGA-II
// selection, elitism, two-point crossover, gene mutation, and the mono /
// multi-objective fitness functions.
//
// Determinism contract: all breeding randomness is drawn serially from one
// master stream; evaluation noise uses one substream per (generation, slot).
// Results are therefore byte-identical for any thread count.

#ifndef QGK_GA_HPP
#define QGK_GA_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "qgk/common.hpp"
#include "qgk/dataset.hpp"
#include "qgk/genome.hpp"
#include "qgk/kernel.hpp"
#include "qgk/rng.hpp"
#include "qgk/svm.hpp"
#include "qgk/transpile.hpp"

namespace qgk {

enum class ObjectiveMode { mono, multi };

struct GaConfig {
    int population = 50;       // N
    int generations = 250;     // G
    int parent_count = 10;     // M
    int elite_count = 5;       // K
    double mutation_rate = 0.05;
    double crossover_prob = 0.9;
    double eta = 0.025;        // sigma weight in the mono fitness
    ObjectiveMode objective = ObjectiveMode::mono;
    std::uint64_t seed = 0;
    GeneConfig gene;
    double svm_c = 1.0;
    double svm_tol = 1e-3;
    int folds = 5;
    int patience = 0;          // 0 disables the convergence early stop
    bool stochastic_selection = false;
    double noise_sigma = 0.0;  // per-entry Gaussian noise (mu_s)
    unsigned threads = 1;

    void validate() const {
        gene.validate();
        if (population < 1) throw data_error("ga: population must be >= 1");
        if (generations < 1) throw data_error("ga: generations must be >= 1");
        if (elite_count < 0 || parent_count < 1 || elite_count > parent_count ||
            parent_count > population)
            throw data_error("ga: need 0 <= elites <= parents <= population");
        if (mutation_rate < 0.0 || mutation_rate > 1.0)
            throw data_error("ga: mutation rate must lie in [0,1]");
        if (crossover_prob < 0.0 || crossover_prob > 1.0)
            throw data_error("ga: crossover probability must lie in [0,1]");
        if (eta < 0.0) throw data_error("ga: eta must be >= 0");
        if (folds < 2) throw data_error("ga: folds must be >= 2");
        if (noise_sigma < 0.0) throw data_error("ga: noise sigma must be >= 0");
    }
};

struct FitnessRecord {
    double accuracy = 0.0;  // a
    double sigma = 0.0;     // off-diagonal kernel std
    int depth = 0;          // transpiled depth d
    double fitness = 0.0;   // a + eta * sigma
    std::array<double, 2> objectives{0.0, 0.0};  // (a, -d), maximization
};

struct GenerationLog {
    int generation = 0;
    double best_f = 0.0;
    double mean_f = 0.0;
    std::size_t best_index = 0;
    std::vector<FitnessRecord> records;
    std::vector<std::size_t> front;  // rank-0 members (multi-objective mode)
    std::uint64_t rng_stream_base = 0;
};

struct RunResult {
    std::vector<GenerationLog> logs;
    std::vector<Chromosome> final_population;
    Chromosome best;
    FitnessRecord best_record;
    std::size_t kernel_evaluations = 0;
    bool stopped_early = false;
};

inline double fitness_mono(double accuracy, double sigma, double eta) {
    return accuracy + eta * sigma;
}

/// Deterministic steady-state selection: the M highest-fitness chromosomes,
/// ties broken toward the lower index.
inline std::vector<std::size_t> select_parents_steady_state(
    std::span<const double> fitness, std::size_t parent_count) {
    if (parent_count > fitness.size())
        throw data_error("parent count exceeds population");
    std::vector<std::size_t> order(fitness.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fitness[a] > fitness[b];
    });
    order.resize(parent_count);
    return order;
}

struct Nsga2Result {
    std::vector<int> rank;          // 0 = non-dominated front
    std::vector<double> crowding;   // +inf at front boundaries
};

/// Fast non-dominated sorting and crowding distance (maximization on every
/// component).
inline Nsga2Result nsga2_sort(const std::vector<std::vector<double>>& objectives) {
    const std::size_t n = objectives.size();
    if (n == 0) return {};
    const std::size_t m = objectives[0].size();
    if (m < 2) throw data_error("nsga2: need at least 2 objectives");
    for (const auto& v : objectives)
        if (v.size() != m) throw data_error("nsga2: ragged objective vectors");

    auto dominates = [&](std::size_t a, std::size_t b) {
        bool strictly = false;
        for (std::size_t k = 0; k < m; ++k) {
            if (objectives[a][k] < objectives[b][k]) return false;
            if (objectives[a][k] > objectives[b][k]) strictly = true;
        }
        return strictly;
    };

    Nsga2Result res;
    res.rank.assign(n, -1);
    res.crowding.assign(n, 0.0);
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<int> domination_count(n, 0);
    std::vector<std::size_t> current;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            if (dominates(a, b))
                dominated_by[a].push_back(b);
            else if (dominates(b, a))
                ++domination_count[a];
        }
        if (domination_count[a] == 0) {
            res.rank[a] = 0;
            current.push_back(a);
        }
    }
    int level = 0;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t a : current) {
            for (std::size_t b : dominated_by[a]) {
                if (--domination_count[b] == 0) {
                    res.rank[b] = level + 1;
                    next.push_back(b);
                }
            }
        }
        // Crowding distance within the finished front.
        std::vector<std::size_t> front = current;
        for (std::size_t k = 0; k < m; ++k) {
            std::sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
                return objectives[a][k] < objectives[b][k];
            });
            const double lo = objectives[front.front()][k];
            const double hi = objectives[front.back()][k];
            res.crowding[front.front()] = std::numeric_limits<double>::infinity();
            res.crowding[front.back()] = std::numeric_limits<double>::infinity();
            if (hi - lo <= 0.0) continue;
            for (std::size_t p = 1; p + 1 < front.size(); ++p)
                res.crowding[front[p]] +=
                    (objectives[front[p + 1]][k] - objectives[front[p - 1]][k]) /
                    (hi - lo);
        }
        current = std::move(next);
        ++level;
    }
    return res;
}

namespace detail {

/// Offspring = p1[0,a) + p2[a,b) + p1[b,L) for explicit cuts a < b.
inline Chromosome crossover_at(const Chromosome& p1, const Chromosome& p2,
                               std::size_t a, std::size_t b) {
    if (p1.genes.size() != p2.genes.size())
        throw data_error("crossover: parent length mismatch");
    Chromosome child = p1;
    for (std::size_t i = a; i < b; ++i) child.genes[i] = p2.genes[i];
    return child;
}

/// Positions mutated for a chromosome of length L: exactly round(mu * L)
/// distinct positions, uniform without replacement.
inline std::vector<std::size_t> mutation_positions(std::size_t length, double mu,
                                                   std::mt19937_64& rng) {
    const auto count = static_cast<std::size_t>(
        std::lround(mu * static_cast<double>(length)));
    std::vector<std::size_t> all(length);
    std::iota(all.begin(), all.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `count` entries are the sample.
    for (std::size_t i = 0; i < count && i < length; ++i) {
        std::uniform_int_distribution<std::size_t> dist(i, length - 1);
        std::swap(all[i], all[dist(rng)]);
    }
    all.resize(std::min(count, length));
    return all;
}

}  // namespace detail

/// Two-point crossover with cut points 0 <= a < b <= L drawn uniformly over
/// all such pairs.
inline Chromosome crossover_two_point(const Chromosome& p1, const Chromosome& p2,
                                      std::mt19937_64& rng) {
    if (p1.genes.size() != p2.genes.size())
        throw data_error("crossover: parent length mismatch");
    if (p1.genes.size() < 3) throw data_error("crossover: chromosome too short");
    std::uniform_int_distribution<std::size_t> dist(0, p1.genes.size());
    std::size_t a = dist(rng), b = dist(rng);
    while (a == b) {
        a = dist(rng);
        b = dist(rng);
    }
    if (a > b) std::swap(a, b);
    return detail::crossover_at(p1, p2, a, b);
}

/// Replaces exactly round(mu * L) gene positions with uniform draws from
/// their own ranges (a redraw may repeat the old value).
inline Chromosome mutate(Chromosome c, double mu, const GeneConfig& cfg,
                         std::mt19937_64& rng) {
    if (mu < 0.0 || mu > 1.0) throw data_error("mutation rate must lie in [0,1]");
    const std::vector<std::size_t> positions =
        detail::mutation_positions(c.genes.size(), mu, rng);
    for (std::size_t p : positions) {
        std::uniform_int_distribution<int> dist(0, cfg.gene_max(static_cast<int>(p % 6)));
        c.genes[p] = dist(rng);
    }
    return c;
}

/// Shared evaluation context. Folds are drawn once per run so fitness
/// differences across chromosomes reflect feature maps, not fold luck.
class Evaluator {
  public:
    Evaluator(const GaConfig& cfg, const Dataset& data, const BackendModel& backend)
        : cfg_(cfg), data_(data), backend_(backend) {
        folds_ = kfold_split(data, cfg.folds, derive_seed(cfg.seed, {0xF01D5}));
    }

    const FoldAssignment& folds() const { return folds_; }

    /// Full metric set for one chromosome. `noise_stream` seeds the fresh
    /// per-evaluation kernel noise; it is ignored when noise_sigma == 0.
    FitnessRecord evaluate(const Chromosome& chrom, std::uint64_t noise_stream) const {
        const std::vector<Statevector> states = embed_all(chrom, cfg_.gene, data_);
        KernelMatrix k = kernel_matrix(states);
        if (cfg_.noise_sigma > 0.0)
            k = noisy_kernel(k, std::nullopt, cfg_.noise_sigma, 0.0, noise_stream);

        FitnessRecord rec;
        rec.sigma = offdiag_std(k);
        rec.accuracy = cv_accuracy(k, data_.labels, folds_, cfg_.svm_c, cfg_.svm_tol);
        const Circuit structure = decode(chrom, cfg_.gene, data_.row(0));
        rec.depth = depth(route(structure, backend_).circuit);
        rec.fitness = fitness_mono(rec.accuracy, rec.sigma, cfg_.eta);
        rec.objectives = {rec.accuracy, -static_cast<double>(rec.depth)};
        return rec;
    }

  private:
    const GaConfig& cfg_;
    const Dataset& data_;
    const BackendModel& backend_;
    FoldAssignment folds_;
};

namespace detail {

/// Population order for selection: descending fitness (mono) or
/// (rank, -crowding) lexicographic (multi); ties toward the lower index.
inline std::vector<std::size_t> selection_order(const std::vector<FitnessRecord>& recs,
                                                ObjectiveMode mode,
                                                std::vector<std::size_t>* front_out) {
    std::vector<std::size_t> order(recs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (mode == ObjectiveMode::mono) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return recs[a].fitness > recs[b].fitness;
        });
        return order;
    }
    std::vector<std::vector<double>> obj(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
        obj[i] = {recs[i].objectives[0], recs[i].objectives[1]};
    const Nsga2Result sorted = nsga2_sort(obj);
    if (front_out) {
        front_out->clear();
        for (std::size_t i = 0; i < recs.size(); ++i)
            if (sorted.rank[i] == 0) front_out->push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sorted.rank[a] != sorted.rank[b]) return sorted.rank[a] < sorted.rank[b];
        return sorted.crowding[a] > sorted.crowding[b];
    });
    return order;
}

/// Rank-proportional stochastic parent choice (config switch); weight of the
/// i-th individual in selection order is M - position.
inline std::vector<std::size_t> stochastic_parents(
    const std::vector<std::size_t>& order, std::size_t parent_count,
    std::mt19937_64& rng) {
    std::vector<std::size_t> pool = order;
    std::vector<std::size_t> picked;
    picked.reserve(parent_count);
    for (std::size_t k = 0; k < parent_count; ++k) {
        std::vector<double> weights(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i)
            weights[i] = static_cast<double>(pool.size() - i);
        std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
        const std::size_t at = dist(rng);
        picked.push_back(pool[at]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
    }
    return picked;
}

}  // namespace detail

/// Runs the full genetic search. Per generation: evaluate new chromosomes,
/// log, select parents, copy K elites unchanged, breed N-K offspring
/// (crossover with probability gamma, then mutation). Elite records are
/// carried over, so the kernel-evaluation count is N + G*(N-K) when no
/// early stop fires.
inline RunResult run_ga(const GaConfig& cfg, const Dataset& data,
                        const BackendModel& backend) {
    cfg.validate();
    backend.validate();
    if (static_cast<int>(data.feature_count) != cfg.gene.feature_count)
        throw data_error("dataset feature count does not match gene config");

    Evaluator evaluator(cfg, data, backend);
    const auto n = static_cast<std::size_t>(cfg.population);
    const auto elite_n = static_cast<std::size_t>(cfg.elite_count);

    std::mt19937_64 breed_rng = make_stream(cfg.seed, {0xB4EED});
    std::mt19937_64 init_rng = make_stream(cfg.seed, {0x1A17});

    std::vector<Chromosome> population(n);
    std::vector<std::optional<FitnessRecord>> records(n);
    for (auto& c : population) c = random_chromosome(cfg.gene, init_rng);

    RunResult result;
    double best_so_far = -std::numeric_limits<double>::infinity();
    int stale_generations = 0;

    for (int gen = 0; gen <= cfg.generations; ++gen) {
        // Evaluate chromosomes without a carried record.
        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < n; ++i)
            if (!records[i]) todo.push_back(i);
        parallel_for(todo.size(), cfg.threads, [&](std::size_t t) {
            const std::size_t slot = todo[t];
            const std::uint64_t stream = derive_seed(
                cfg.seed, {0xE7A1, static_cast<std::uint64_t>(gen), slot});
            records[slot] = evaluator.evaluate(population[slot], stream);
        });
        result.kernel_evaluations += todo.size();

        GenerationLog log;
        log.generation = gen;
        log.rng_stream_base =
            derive_seed(cfg.seed, {0xE7A1, static_cast<std::uint64_t>(gen)});
        log.records.reserve(n);
        for (std::size_t i = 0; i < n; ++i) log.records.push_back(*records[i]);
        log.best_index = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += log.records[i].fitness;
            if (log.records[i].fitness > log.records[log.best_index].fitness)
                log.best_index = i;
        }
        log.best_f = log.records[log.best_index].fitness;
        log.mean_f = sum / static_cast<double>(n);

        std::vector<std::size_t> order =
            detail::selection_order(log.records, cfg.objective,
                                    cfg.objective == ObjectiveMode::multi ? &log.front
                                                                          : nullptr);
        result.logs.push_back(log);

        if (log.best_f > best_so_far) {
            best_so_far = log.best_f;
            result.best = population[log.best_index];
            result.best_record = log.records[log.best_index];
            stale_generations = 0;
        } else {
            ++stale_generations;
        }
        if (gen == cfg.generations) break;
        if (cfg.patience > 0 && stale_generations >= cfg.patience) {
            result.stopped_early = true;
            break;
        }

        // Parents and elites.
        std::vector<std::size_t> parents(
            order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.parent_count));
        if (cfg.stochastic_selection)
            parents = detail::stochastic_parents(order, parents.size(), breed_rng);

        std::vector<Chromosome> next(n);
        std::vector<std::optional<FitnessRecord>> next_records(n);
        for (std::size_t e = 0; e < elite_n; ++e) {
            next[e] = population[order[e]];
            next_records[e] = *records[order[e]];
        }
        for (std::size_t slot = elite_n; slot < n; ++slot) {
            std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
            const std::size_t p1 = parents[pick(breed_rng)];
            std::size_t p2 = p1;
            if (parents.size() > 1)
                while (p2 == p1) p2 = parents[pick(breed_rng)];
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            Chromosome child = coin(breed_rng) < cfg.crossover_prob
                                   ? crossover_two_point(population[p1],
                                                         population[p2], breed_rng)
                                   : population[p1];
            next[slot] = mutate(std::move(child), cfg.mutation_rate, cfg.gene, breed_rng);
        }
        population = std::move(next);
        records = std::move(next_records);
    }

    result.final_population = std::move(population);
    return result;
}

}  // namespace qgk

#endif  // QGK_GA_HPP
