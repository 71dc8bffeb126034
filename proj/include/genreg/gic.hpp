#pragma once

#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"
#include "genreg/least_squares.hpp"
#include "genreg/model_mask.hpp"

namespace genreg {

struct GicConfig {
    double kappa_n = 0.0;       // per-variable penalty
    double sigma2_floor = 0.0;  // keeps log(sigma2) finite on perfect fits
};

// kappa_n = 3.5 log d; variance floor scaled to the response so a zero-RSS
// fit scores finitely instead of -inf.
inline GicConfig default_gic_config(const Dataset& data, double kappa = 0.0) {
    GicConfig cfg;
    cfg.kappa_n = kappa > 0.0 ? kappa : 3.5 * std::log(double(data.d()));
    cfg.sigma2_floor = 1e-12 * (data.Y.squaredNorm() / data.n() + 1.0);
    return cfg;
}

inline double gic_from_rss(int n, double rss, int size,
                           const GicConfig& cfg) {
    double sigma2 = std::max(rss / n, cfg.sigma2_floor);
    return n * std::log(sigma2) + cfg.kappa_n * size;
}

// Generalized information criterion n log sigma2_hat + kappa_n |u|.
inline double gic(const Dataset& data, const ModelMask& u,
                  const GicConfig& cfg) {
    return gic_from_rss(data.n(), rss_of_fit(data, u), u.count(), cfg);
}

// Every model scored so far. Feasible models (|u| < n, full rank) cache
// their fitness; rank-deficient masks are memoized as unscoreable so they
// are never refit. worst_feasible tracks the running minimum fitness over
// all feasible models ever scored, the value handed to oversized masks.
struct FitnessLedger {
    std::unordered_map<ModelMask, double, ModelMaskHash> cache;
    std::unordered_set<ModelMask, ModelMaskHash> unscoreable;
    double worst_feasible = std::numeric_limits<double>::infinity();
    long long models_evaluated = 0;

    bool has_feasible() const { return !cache.empty(); }
};

// Fitness f(u) = -GIC(u) when the model is scoreable; otherwise the worst
// fitness seen over all feasible models so far. The oversized branch keeps
// the search space effectively bounded without discarding the member.
inline double fitness(const Dataset& data, const ModelMask& u,
                      const GicConfig& cfg, FitnessLedger& ledger) {
    auto worst = [&]() {
        if (!ledger.has_feasible())
            throw NoFeasibleHistory(
                "fitness: no feasible model scored before an unscoreable one");
        return ledger.worst_feasible;
    };

    if (u.count() >= data.n()) return worst();
    if (ledger.unscoreable.count(u)) return worst();

    auto it = ledger.cache.find(u);
    if (it != ledger.cache.end()) return it->second;

    double f;
    try {
        f = -gic(data, u, cfg);
    } catch (const RankDeficient&) {
        ledger.unscoreable.insert(u);
        return worst();
    }
    ++ledger.models_evaluated;
    ledger.cache.emplace(u, f);
    if (f < ledger.worst_feasible) ledger.worst_feasible = f;
    return f;
}

}  // namespace genreg
