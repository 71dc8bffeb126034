#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "genreg/association.hpp"
#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"
#include "genreg/gic.hpp"
#include "genreg/model_mask.hpp"
#include "genreg/rng.hpp"
#include "genreg/stats.hpp"

namespace genreg {

enum class MutationKind { uniform, adaptive };

struct GaConfig {
    int population_size = 0;    // 0 = auto: 4 x min_population_size(d, 0.9999)
    double mutation_rate = 0.0; // 0 = auto: 1/d
    MutationKind mutation_kind = MutationKind::adaptive;
    AssociationKind association_kind = AssociationKind::marginal_correlation;
    double termination_alpha = 0.05;
    int termination_gap = 10;
    int max_generations = 200;
    bool terminate_on_reject = false;
    uint64_t seed = 0;
};

struct Member {
    ModelMask mask;
    double fitness = 0.0;
};

struct Population {
    int generation = 0;
    std::vector<Member> members;

    int size() const { return static_cast<int>(members.size()); }

    std::vector<double> fitnesses() const {
        std::vector<double> f;
        f.reserve(members.size());
        for (const Member& m : members) f.push_back(m.fitness);
        return f;
    }
};

struct GaResult {
    Population final_population;
    ModelMask best;
    double best_fitness = 0.0;
    int generations_run = 0;
    std::vector<double> mean_fitness_history;
    std::vector<double> best_fitness_history;
    long long models_evaluated = 0;
    bool terminated_by_test = false;
};

// Smallest K with 1 - (1 - 2^{-(K-1)})^d >= p_star: the population size at
// which every variable appears in the initial gene pool with probability
// at least p_star.
inline int min_population_size(int d, double p_star) {
    if (d < 1) throw ConfigError("min_population_size: d must be >= 1");
    if (!(p_star > 0.0 && p_star < 1.0))
        throw ConfigError("min_population_size: p_star must lie in (0,1)");
    double v = 1.0 + std::log(-double(d) / std::log(p_star)) / std::log(2.0);
    return static_cast<int>(std::ceil(v));
}

inline int auto_population_size(int d) {
    return 4 * min_population_size(d, 0.9999);
}

// Fill in auto values and enforce invariants against a dataset dimension.
inline GaConfig resolve_config(GaConfig cfg, int d) {
    if (cfg.population_size == 0) cfg.population_size = auto_population_size(d);
    if (cfg.mutation_rate == 0.0) cfg.mutation_rate = 1.0 / double(d);
    if (cfg.population_size < 2)
        throw ConfigError("GaConfig: population size must be >= 2");
    if (!(cfg.mutation_rate > 0.0 && cfg.mutation_rate < 1.0))
        throw ConfigError("GaConfig: mutation rate must lie in (0,1)");
    if (cfg.termination_gap < 1)
        throw ConfigError("GaConfig: termination gap must be >= 1");
    if (!(cfg.termination_alpha > 0.0 && cfg.termination_alpha < 1.0))
        throw ConfigError("GaConfig: termination alpha must lie in (0,1)");
    if (cfg.max_generations < 1)
        throw ConfigError("GaConfig: max generations must be >= 1");
    return cfg;
}

// w_k proportional to exp(f_k / 2), computed after subtracting max(f).
inline std::vector<double> selection_weights(
    const std::vector<double>& fitnesses) {
    std::vector<double> half(fitnesses.size());
    for (size_t i = 0; i < fitnesses.size(); ++i) {
        if (!std::isfinite(fitnesses[i]))
            throw NumericError("selection_weights: non-finite fitness");
        half[i] = 0.5 * fitnesses[i];
    }
    return softmax_shifted(half);
}

// Index of the best member: maximal fitness, ties by smaller model size,
// then lexicographically smaller bit sequence.
inline int elitist_index(const Population& pop) {
    if (pop.members.empty()) throw ConfigError("elitist: empty population");
    int best = 0;
    for (int k = 1; k < pop.size(); ++k) {
        const Member& a = pop.members[static_cast<size_t>(k)];
        const Member& b = pop.members[static_cast<size_t>(best)];
        if (a.fitness > b.fitness ||
            (a.fitness == b.fitness && size_lex_less(a.mask, b.mask)))
            best = k;
    }
    return best;
}

inline ModelMask elitist(const Population& pop) {
    return pop.members[static_cast<size_t>(elitist_index(pop))].mask;
}

// Two independent categorical draws; the parents may coincide.
inline std::pair<int, int> select_parent_pair(const std::vector<double>& w,
                                              Rng& rng) {
    int a = rng.categorical(w);
    int b = rng.categorical(w);
    return {a, b};
}

// Each position copies p1's bit with probability 1/2, else p2's.
inline ModelMask uniform_crossover(const ModelMask& p1, const ModelMask& p2,
                                   Rng& rng) {
    if (p1.dimension() != p2.dimension())
        throw ConfigError("uniform_crossover: length mismatch");
    ModelMask child(p1.dimension());
    for (int j = 0; j < p1.dimension(); ++j)
        child.set(j, rng.bernoulli(0.5) ? p1.test(j) : p2.test(j));
    return child;
}

// Each bit flips independently with probability pi_m.
inline ModelMask uniform_mutation(const ModelMask& child, double pi_m,
                                  Rng& rng) {
    ModelMask out = child;
    for (int j = 0; j < out.dimension(); ++j)
        if (rng.bernoulli(pi_m)) out.flip(j);
    return out;
}

// Pre-clip per-position flip probabilities: active positions flip inversely
// to their association (total budget |V+| pi_m), inactive positions flip
// proportionally to it (total budget |V-| pi_m). Degenerate groups (zero or
// empty totals) fall back to the uniform rate.
inline std::vector<double> adaptive_mutation_rates(
    const ModelMask& child, const std::vector<double>& gamma, double pi_m) {
    const int d = child.dimension();
    if (static_cast<int>(gamma.size()) != d)
        throw ConfigError("adaptive_mutation_rates: gamma length mismatch");
    double gmax = 0.0;
    for (double g : gamma) {
        if (!(g >= 0.0))
            throw ConfigError("adaptive_mutation_rates: negative gamma");
        gmax = std::max(gmax, g);
    }
    std::vector<double> rates(static_cast<size_t>(d), 0.0);
    const double eps = 1e-12 * gmax;

    double inv_sum = 0.0, pos_count = 0.0;
    double dir_sum = 0.0, neg_count = 0.0;
    for (int j = 0; j < d; ++j) {
        if (child.test(j)) {
            inv_sum += 1.0 / std::max(gamma[static_cast<size_t>(j)], eps);
            pos_count += 1.0;
        } else {
            dir_sum += gamma[static_cast<size_t>(j)];
            neg_count += 1.0;
        }
    }
    for (int j = 0; j < d; ++j) {
        double g = gamma[static_cast<size_t>(j)];
        if (child.test(j)) {
            rates[static_cast<size_t>(j)] =
                (gmax == 0.0 || inv_sum == 0.0)
                    ? pi_m
                    : (1.0 / std::max(g, eps)) / inv_sum * pos_count * pi_m;
        } else {
            rates[static_cast<size_t>(j)] =
                (gmax == 0.0 || dir_sum == 0.0)
                    ? pi_m
                    : g / dir_sum * neg_count * pi_m;
        }
    }
    return rates;
}

// Adaptive mutation: per-position rates clipped to [0,1], independent flips.
inline ModelMask adaptive_mutation(const ModelMask& child,
                                   const std::vector<double>& gamma,
                                   double pi_m, Rng& rng) {
    std::vector<double> rates = adaptive_mutation_rates(child, gamma, pi_m);
    ModelMask out = child;
    for (int j = 0; j < out.dimension(); ++j) {
        double p = std::clamp(rates[static_cast<size_t>(j)], 0.0, 1.0);
        if (rng.bernoulli(p)) out.flip(j);
    }
    return out;
}

// One child construction: select a parent pair, cross over, mutate.
// gamma is ignored for uniform mutation.
inline ModelMask breed_child(const Population& parents,
                             const std::vector<double>& weights,
                             const GaConfig& cfg,
                             const std::vector<double>& gamma, Rng& rng) {
    auto [i, j] = select_parent_pair(weights, rng);
    ModelMask child =
        uniform_crossover(parents.members[static_cast<size_t>(i)].mask,
                          parents.members[static_cast<size_t>(j)].mask, rng);
    if (cfg.mutation_kind == MutationKind::adaptive)
        return adaptive_mutation(child, gamma, cfg.mutation_rate, rng);
    return uniform_mutation(child, cfg.mutation_rate, rng);
}

// Welch test on the current vs lagged population fitness values. Default
// polarity stops once the means are statistically indistinguishable
// (stabilization); terminate_on_reject inverts this. The max-generation cap
// always terminates.
inline bool should_terminate(const std::vector<double>& mean_fitness_history,
                             const std::vector<double>& population_fitness_now,
                             const std::vector<double>& population_fitness_lagged,
                             const GaConfig& cfg) {
    int t = static_cast<int>(mean_fitness_history.size()) - 1;
    if (t >= cfg.max_generations) return true;
    if (t < cfg.termination_gap) return false;
    WelchResult w =
        welch_t_test(population_fitness_now, population_fitness_lagged);
    bool rejected = w.p_value < cfg.termination_alpha;
    return cfg.terminate_on_reject ? rejected : !rejected;
}

// Per-generation observer: (generation, population, selection weights).
using GaObserver =
    std::function<void(int, const Population&, const std::vector<double>&)>;

// Algorithm: score generation, copy the elite into slot one, then fill the
// remaining K-1 slots by selection / crossover / mutation, rescore, and
// check termination. Child k of generation t draws from the stream keyed
// (seed, t, k), so runs are reproducible member by member.
inline GaResult run_ga(const Dataset& data, const GaConfig& cfg_in,
                       const Population& initial, const GicConfig& gic_cfg,
                       FitnessLedger& ledger,
                       const GaObserver& observer = nullptr) {
    const GaConfig cfg = resolve_config(cfg_in, data.d());
    const int K = initial.size();
    if (K < 2)
        throw ContractViolation("run_ga: initial population needs K >= 2");
    bool any_feasible = false;
    for (const Member& m : initial.members) {
        if (m.mask.dimension() != data.d())
            throw ContractViolation("run_ga: member dimension mismatch");
        if (m.mask.count() < data.n()) any_feasible = true;
    }
    if (!any_feasible)
        throw ContractViolation("run_ga: no feasible member in the initial "
                                "population");

    std::vector<double> gamma;
    if (cfg.mutation_kind == MutationKind::adaptive)
        gamma = association_measures(data, cfg.association_kind);

    // Score feasible members first so an infeasible slot never observes an
    // empty ledger regardless of member order.
    Population cur = initial;
    cur.generation = 0;
    std::vector<Member*> deferred;
    for (Member& m : cur.members) {
        try {
            m.fitness = fitness(data, m.mask, gic_cfg, ledger);
        } catch (const NoFeasibleHistory&) {
            deferred.push_back(&m);
        }
    }
    for (Member* m : deferred)
        m->fitness = fitness(data, m->mask, gic_cfg, ledger);

    GaResult res;
    std::vector<std::vector<double>> fitness_by_generation;

    auto record = [&](const Population& p) {
        std::vector<double> f = p.fitnesses();
        fitness_by_generation.push_back(f);
        res.mean_fitness_history.push_back(mean_of(f));
        int e = elitist_index(p);
        res.best_fitness_history.push_back(
            p.members[static_cast<size_t>(e)].fitness);
        if (observer) observer(p.generation, p, selection_weights(f));
    };

    record(cur);

    for (int t = 1; t <= cfg.max_generations; ++t) {
        std::vector<double> w = selection_weights(cur.fitnesses());
        Population next;
        next.generation = t;
        next.members.resize(static_cast<size_t>(K));
        next.members[0] = cur.members[static_cast<size_t>(elitist_index(cur))];
        for (int k = 1; k < K; ++k) {
            Rng rng = Rng::keyed(cfg.seed, static_cast<uint64_t>(t),
                                 static_cast<uint64_t>(k));
            ModelMask child = breed_child(cur, w, cfg, gamma, rng);
            double f = fitness(data, child, gic_cfg, ledger);
            next.members[static_cast<size_t>(k)] = {std::move(child), f};
        }
        cur = std::move(next);
        record(cur);

        bool stop = false;
        if (t >= cfg.termination_gap) {
            const std::vector<double>& lagged =
                fitness_by_generation[static_cast<size_t>(
                    t - cfg.termination_gap)];
            if (should_terminate(res.mean_fitness_history,
                                 fitness_by_generation.back(), lagged, cfg)) {
                stop = true;
                res.terminated_by_test = t < cfg.max_generations;
            }
        }
        if (stop || t == cfg.max_generations) break;
    }

    int e = elitist_index(cur);
    res.best = cur.members[static_cast<size_t>(e)].mask;
    res.best_fitness = cur.members[static_cast<size_t>(e)].fitness;
    res.generations_run = cur.generation;
    res.final_population = std::move(cur);
    res.models_evaluated = ledger.models_evaluated;
    return res;
}

}  // namespace genreg
