#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "genreg/association.hpp"
#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"
#include "genreg/ga.hpp"
#include "genreg/gic.hpp"
#include "genreg/model_mask.hpp"
#include "genreg/rng.hpp"

namespace genreg {

enum class InitKind { random_assoc, lasso_path, explicit_masks };

struct InitConfig {
    InitKind kind = InitKind::lasso_path;
    int lambda_grid_size = 100;
    std::vector<ModelMask> masks;  // used by explicit_masks
};

// Association-guided random population: sizes drawn from
// HyperGeom(6m, 2m, m) with m = min(n, d) (mean m/3, support [0, m]),
// positions drawn without replacement with probability proportional to
// gamma. Members are returned unscored (fitness NaN).
inline Population random_initial_population(const Dataset& data,
                                            const std::vector<double>& gamma,
                                            int K, Rng& rng) {
    if (K < 2)
        throw ConfigError("random_initial_population: K must be >= 2");
    if (static_cast<int>(gamma.size()) != data.d())
        throw ConfigError("random_initial_population: gamma length mismatch");
    bool any_positive = false;
    for (double g : gamma) {
        if (!(g >= 0.0))
            throw ConfigError("random_initial_population: negative gamma");
        if (g > 0.0) any_positive = true;
    }
    if (!any_positive)
        throw AllGammaZero("random_initial_population: gamma is all zero");

    const int m = std::min(data.n(), data.d());
    Population pop;
    pop.generation = 0;
    pop.members.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
        int size = rng.hypergeometric(6 * m, 2 * m, m);
        ModelMask mask(data.d());
        for (int j : rng.weighted_sample_without_replacement(gamma, size))
            mask.set(j, true);
        pop.members[static_cast<size_t>(k)] = {
            std::move(mask), std::numeric_limits<double>::quiet_NaN()};
    }
    return pop;
}

// Coordinate-descent lasso on standardized columns (centered response)
// over a log-spaced grid from lambda_max down by a factor 1e-3. Returns the
// distinct support masks along the path, each with |u| < n; constant
// columns never activate.
inline std::vector<ModelMask> lasso_path_models(const Dataset& data,
                                                int lambda_grid_size = 100) {
    const int n = data.n(), d = data.d();
    if (lambda_grid_size < 1)
        throw ConfigError("lasso_path_models: grid size must be >= 1");

    Eigen::VectorXd y = data.Y.array() - data.Y.mean();
    Eigen::MatrixXd Xs(n, d);
    std::vector<bool> usable(static_cast<size_t>(d), false);
    for (int j = 0; j < d; ++j) {
        Eigen::VectorXd c = data.X.col(j).array() - data.X.col(j).mean();
        double sd = std::sqrt(c.squaredNorm() / n);
        if (sd > 0.0) {
            Xs.col(j) = c / sd;
            usable[static_cast<size_t>(j)] = true;
        } else {
            Xs.col(j).setZero();
        }
    }

    double lambda_max = 0.0;
    for (int j = 0; j < d; ++j)
        if (usable[static_cast<size_t>(j)])
            lambda_max = std::max(lambda_max,
                                  std::fabs(Xs.col(j).dot(y)) / n);

    std::vector<ModelMask> path;
    auto push_support = [&](const Eigen::VectorXd& beta) {
        ModelMask mask(d);
        for (int j = 0; j < d; ++j)
            if (beta[j] != 0.0) mask.set(j, true);
        if (mask.count() >= n) return;
        for (const ModelMask& seen : path)
            if (seen == mask) return;
        path.push_back(std::move(mask));
    };

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    push_support(beta);  // lambda >= lambda_max: null support
    if (lambda_max <= 0.0) return path;

    Eigen::VectorXd resid = y;
    auto soft = [](double z, double t) {
        if (z > t) return z - t;
        if (z < -t) return -(-z - t);
        return 0.0;
    };
    const double tol = 1e-7;
    const int max_sweeps = 1000;

    for (int g = 0; g < lambda_grid_size; ++g) {
        double frac = lambda_grid_size == 1
                          ? 1.0
                          : double(g) / double(lambda_grid_size - 1);
        double lambda = lambda_max * std::pow(1e-3, frac);
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double max_delta = 0.0;
            for (int j = 0; j < d; ++j) {
                if (!usable[static_cast<size_t>(j)]) continue;
                double old = beta[j];
                double rho = Xs.col(j).dot(resid) / n + old;
                double updated = soft(rho, lambda);
                if (updated != old) {
                    resid -= (updated - old) * Xs.col(j);
                    beta[j] = updated;
                    max_delta = std::max(max_delta, std::fabs(updated - old));
                }
            }
            if (max_delta < tol) break;
        }
        push_support(beta);
    }
    return path;
}

// Dedupe, then truncate to the K fittest or pad with random draws, scoring
// every member against the ledger. The returned population always has
// exactly K members and at least one feasible one.
inline Population assemble_population(const std::vector<ModelMask>& masks,
                                      int K, const Dataset& data,
                                      const GicConfig& gic_cfg,
                                      const std::vector<double>& gamma,
                                      FitnessLedger& ledger, Rng& rng) {
    if (K < 2) throw ConfigError("assemble_population: K must be >= 2");

    std::vector<ModelMask> pool;
    for (const ModelMask& m : masks) {
        if (m.dimension() != data.d())
            throw ConfigError("assemble_population: mask dimension mismatch");
        bool dup = false;
        for (const ModelMask& seen : pool)
            if (seen == m) {
                dup = true;
                break;
            }
        if (!dup) pool.push_back(m);
    }

    auto score_all = [&](std::vector<Member>& members) {
        std::vector<Member*> deferred;
        for (Member& m : members) {
            try {
                m.fitness = fitness(data, m.mask, gic_cfg, ledger);
            } catch (const NoFeasibleHistory&) {
                deferred.push_back(&m);
            }
        }
        for (Member* m : deferred) {
            try {
                m->fitness = fitness(data, m->mask, gic_cfg, ledger);
            } catch (const NoFeasibleHistory&) {
                throw ContractViolation(
                    "assemble_population: no feasible member available");
            }
        }
    };

    std::vector<Member> members;
    for (ModelMask& m : pool) members.push_back({std::move(m), 0.0});

    if (static_cast<int>(members.size()) > K) {
        score_all(members);
        std::stable_sort(members.begin(), members.end(),
                         [](const Member& a, const Member& b) {
                             if (a.fitness != b.fitness)
                                 return a.fitness > b.fitness;
                             return size_lex_less(a.mask, b.mask);
                         });
        members.resize(static_cast<size_t>(K));
    } else if (static_cast<int>(members.size()) < K) {
        int rounds = 0;
        while (static_cast<int>(members.size()) < K && rounds < 50) {
            int need = K - static_cast<int>(members.size());
            Population pads = random_initial_population(
                data, gamma, std::max(need, 2), rng);
            for (int i = 0; i < need; ++i) {
                const ModelMask& cand =
                    pads.members[static_cast<size_t>(i)].mask;
                bool dup = false;
                for (const Member& m : members)
                    if (m.mask == cand) {
                        dup = true;
                        break;
                    }
                if (!dup) members.push_back({cand, 0.0});
            }
            ++rounds;
        }
        while (static_cast<int>(members.size()) < K) {
            Population pads = random_initial_population(data, gamma, 2, rng);
            members.push_back({pads.members[0].mask, 0.0});
        }
        score_all(members);
    } else {
        score_all(members);
    }

    bool any_feasible = false;
    for (const Member& m : members)
        if (m.mask.count() < data.n() && !ledger.unscoreable.count(m.mask))
            any_feasible = true;
    if (!any_feasible)
        throw ContractViolation(
            "assemble_population: population has no feasible member");

    Population pop;
    pop.generation = 0;
    pop.members = std::move(members);
    return pop;
}

// One-stop initializer used by the CLI and the experiment harness.
inline Population build_initial_population(const Dataset& data,
                                           const InitConfig& init_cfg,
                                           const GaConfig& ga_cfg,
                                           const GicConfig& gic_cfg,
                                           FitnessLedger& ledger) {
    GaConfig cfg = resolve_config(ga_cfg, data.d());
    std::vector<double> gamma =
        association_measures(data, cfg.association_kind);
    Rng rng = Rng::keyed(cfg.seed, 0x696e6974ULL);  // init-stage stream

    std::vector<ModelMask> masks;
    switch (init_cfg.kind) {
        case InitKind::random_assoc: {
            Population p = random_initial_population(
                data, gamma, cfg.population_size, rng);
            for (Member& m : p.members) masks.push_back(std::move(m.mask));
            break;
        }
        case InitKind::lasso_path:
            masks = lasso_path_models(data, init_cfg.lambda_grid_size);
            break;
        case InitKind::explicit_masks:
            masks = init_cfg.masks;
            break;
    }
    return assemble_population(masks, cfg.population_size, data, gic_cfg,
                               gamma, ledger, rng);
}

}  // namespace genreg
