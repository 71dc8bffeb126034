#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "genreg/errors.hpp"
#include "genreg/ga.hpp"
#include "genreg/model_mask.hpp"
#include "genreg/rng.hpp"
#include "genreg/schema.hpp"

namespace genreg {

// Exact-chain instance: explicit fitness per mask on {0,1}^d, population
// size K. States are size-K multisets of mask codes.
struct ChainSpec {
    int d = 2;
    int K = 2;
    double pi_m = 0.2;
    std::vector<double> fitness_table;  // length 2^d, unique argmax

    int mask_count() const { return 1 << d; }

    void validate() const {
        if (d < 1 || d > 20) throw ConfigError("ChainSpec: d out of range");
        if (K < 2) throw ConfigError("ChainSpec: K must be >= 2");
        if (!(pi_m > 0.0 && pi_m < 1.0))
            throw ConfigError("ChainSpec: pi_m must lie in (0,1)");
        if (static_cast<int>(fitness_table.size()) != mask_count())
            throw ConfigError("ChainSpec: fitness table must have 2^d entries");
        int arg = 0, ties = 0;
        for (int c = 1; c < mask_count(); ++c)
            if (fitness_table[size_t(c)] > fitness_table[size_t(arg)]) arg = c;
        for (int c = 0; c < mask_count(); ++c)
            if (fitness_table[size_t(c)] == fitness_table[size_t(arg)]) ++ties;
        if (ties != 1)
            throw ConfigError("ChainSpec: fitness table needs a unique argmax");
    }

    int best_code() const {
        int arg = 0;
        for (int c = 1; c < mask_count(); ++c)
            if (fitness_table[size_t(c)] > fitness_table[size_t(arg)]) arg = c;
        return arg;
    }
};

using ChainState = std::vector<int>;  // sorted mask codes, size K

inline uint64_t multiset_count(int items, int K) {
    // C(K + items - 1, K) with overflow guard against the enumeration cap.
    long double v = 1.0L;
    for (int i = 1; i <= K; ++i)
        v = v * (items - 1 + i) / i;
    return static_cast<uint64_t>(v + 0.5L);
}

// All size-K multisets over {0,...,2^d - 1} in canonical sorted order.
inline std::vector<ChainState> enumerate_states(int d, int K) {
    const int M = 1 << d;
    if (multiset_count(M, K) > 100000)
        throw TooLarge("enumerate_states: state space exceeds 1e5");
    std::vector<ChainState> states;
    ChainState cur(static_cast<size_t>(K), 0);
    std::function<void(int, int)> rec = [&](int pos, int lo) {
        if (pos == K) {
            states.push_back(cur);
            return;
        }
        for (int c = lo; c < M; ++c) {
            cur[size_t(pos)] = c;
            rec(pos + 1, c);
        }
    };
    rec(0, 0);
    return states;
}

namespace detail {

inline std::string state_key(const ChainState& s) {
    std::string k;
    for (int c : s) {
        k += std::to_string(c);
        k += ',';
    }
    return k;
}

// Child mask law q(v): mixture over ordered parent pairs of the
// independent-position crossover-then-flip product (the schema-lab
// primitive with a fully fixed schema).
inline std::vector<double> child_law(const ChainState& state,
                                     const ChainSpec& spec) {
    const int K = static_cast<int>(state.size());
    std::vector<double> fit(static_cast<size_t>(K));
    std::vector<ModelMask> masks;
    masks.reserve(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
        fit[size_t(k)] = spec.fitness_table[size_t(state[size_t(k)])];
        masks.push_back(ModelMask::from_code(spec.d, uint64_t(state[size_t(k)])));
    }
    std::vector<double> w = selection_weights(fit);

    std::vector<double> q(static_cast<size_t>(spec.mask_count()), 0.0);
    for (int v = 0; v < spec.mask_count(); ++v) {
        Schema target = Schema::from_string(
            ModelMask::from_code(spec.d, uint64_t(v)).to_string());
        double p = 0.0;
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < K; ++l)
                p += w[size_t(k)] * w[size_t(l)] *
                     pair_child_match_prob(masks[size_t(k)], masks[size_t(l)],
                                           target, spec.pi_m);
        q[size_t(v)] = p;
    }
    return q;
}

inline int elite_code(const ChainState& state, const ChainSpec& spec) {
    int best = state[0];
    for (int c : state) {
        double fc = spec.fitness_table[size_t(c)];
        double fb = spec.fitness_table[size_t(best)];
        if (fc > fb) {
            best = c;
        } else if (fc == fb && c != best) {
            ModelMask mc = ModelMask::from_code(spec.d, uint64_t(c));
            ModelMask mb = ModelMask::from_code(spec.d, uint64_t(best));
            if (size_lex_less(mc, mb)) best = c;
        }
    }
    return best;
}

}  // namespace detail

// Exact one-step distribution from a state: the elite survives, the other
// K-1 slots are i.i.d. draws from the child law; the result is aggregated
// over canonical multiset states in the order given by `states`.
inline std::vector<double> one_step_kernel(const ChainState& state,
                                           const ChainSpec& spec,
                                           const std::vector<ChainState>& states) {
    spec.validate();
    std::map<std::string, int> index;
    for (size_t i = 0; i < states.size(); ++i)
        index[detail::state_key(states[i])] = static_cast<int>(i);

    const int K = spec.K;
    std::vector<double> q = detail::child_law(state, spec);
    int elite = detail::elite_code(state, spec);

    std::vector<double> row(states.size(), 0.0);
    // Enumerate child multisets of size K-1 with multinomial weights.
    ChainState children;
    std::function<void(int, int, double, double)> rec =
        [&](int slot, int lo, double prob, double log_perm) {
            if (slot == K - 1) {
                ChainState next = children;
                next.push_back(elite);
                std::sort(next.begin(), next.end());
                row[size_t(index.at(detail::state_key(next)))] +=
                    prob * std::exp(log_perm);
                return;
            }
            for (int c = lo; c < spec.mask_count(); ++c) {
                int run = 0;
                for (int i = static_cast<int>(children.size()) - 1;
                     i >= 0 && children[size_t(i)] == c; --i)
                    ++run;
                children.push_back(c);
                // multinomial coefficient built incrementally:
                // (slot+1)! / prod(count_i!) via log factors
                rec(slot + 1, c,
                    prob * q[size_t(c)],
                    log_perm + std::log(double(slot + 1)) -
                        std::log(double(run + 1)));
                children.pop_back();
            }
        };
    rec(0, 0, 1.0, 0.0);
    return row;
}

// Full transition matrix over canonical states.
inline Eigen::MatrixXd transition_matrix(const ChainSpec& spec,
                                         const std::vector<ChainState>& states) {
    Eigen::MatrixXd P(states.size(), states.size());
    for (size_t i = 0; i < states.size(); ++i) {
        std::vector<double> row = one_step_kernel(states[i], spec, states);
        for (size_t j = 0; j < states.size(); ++j)
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                row[j];
    }
    return P;
}

// Power iteration from the uniform distribution until the L1 change drops
// below 1e-12 (cap 1e6 sweeps); the result must satisfy ||p'P - p'||_1
// < 1e-10. An identity transition returns the uniform start unchanged.
inline Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P) {
    const Eigen::Index S = P.rows();
    if (P.cols() != S) throw ConfigError("stationary_distribution: not square");
    Eigen::VectorXd p = Eigen::VectorXd::Constant(S, 1.0 / double(S));
    for (long iter = 0; iter < 1000000; ++iter) {
        Eigen::VectorXd next = P.transpose() * p;
        double change = (next - p).lpNorm<1>();
        p = next;
        if (change < 1e-12) {
            double resid = (P.transpose() * p - p).lpNorm<1>();
            if (resid < 1e-10) return p;
        }
    }
    throw NoConvergence("stationary_distribution: power iteration cap hit");
}

inline std::vector<int> m_max_indices(const std::vector<ChainState>& states,
                                      const ChainSpec& spec) {
    int best = spec.best_code();
    std::vector<int> idx;
    for (size_t i = 0; i < states.size(); ++i)
        if (std::find(states[i].begin(), states[i].end(), best) !=
            states[i].end())
            idx.push_back(static_cast<int>(i));
    return idx;
}

// xi: the worst-case one-step probability of landing in M_max (states
// containing the best mask). T_alpha: smallest integer T with
// (1 - xi)^T <= alpha.
inline std::pair<double, int> xi_and_t_alpha(
    const Eigen::MatrixXd& P, const std::vector<ChainState>& states,
    const ChainSpec& spec, double alpha) {
    std::vector<int> mm = m_max_indices(states, spec);
    double xi = 1.0;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        double mass = 0.0;
        for (int j : mm) mass += P(i, j);
        xi = std::min(xi, mass);
    }
    if (xi <= 1e-15)
        throw XiZero("xi_and_t_alpha: no uniform entry probability into "
                     "M_max");
    if (alpha >= 1.0) return {xi, 0};
    if (alpha < 1e-6)
        throw ConfigError("xi_and_t_alpha: alpha below the 1e-6 guard");
    if (xi >= 1.0) return {xi, 1};

    int T = std::max(
        1, static_cast<int>(std::ceil(std::log(alpha) / std::log1p(-xi))));
    while (std::pow(1.0 - xi, T) > alpha) ++T;
    while (T > 0 && std::pow(1.0 - xi, T - 1) <= alpha) --T;
    return {xi, T};
}

// One simulated chain step: elite plus K-1 children sampled from the
// child law; returns the canonical (sorted) successor state.
inline ChainState simulate_step(const ChainState& state, const ChainSpec& spec,
                                Rng& rng) {
    std::vector<double> q = detail::child_law(state, spec);
    ChainState next;
    next.reserve(state.size());
    next.push_back(detail::elite_code(state, spec));
    for (int k = 1; k < spec.K; ++k) next.push_back(rng.categorical(q));
    std::sort(next.begin(), next.end());
    return next;
}

struct ChainResult {
    std::vector<ChainState> states;
    Eigen::MatrixXd transition;
    Eigen::VectorXd stationary;
    double xi = 0.0;
    std::map<double, int> t_alpha;
    std::vector<int> m_max;
    int best_code = 0;
};

inline ChainResult analyze_chain(const ChainSpec& spec,
                                 const std::vector<double>& alphas) {
    spec.validate();
    ChainResult r;
    r.states = enumerate_states(spec.d, spec.K);
    r.transition = transition_matrix(spec, r.states);
    r.stationary = stationary_distribution(r.transition);
    r.m_max = m_max_indices(r.states, spec);
    r.best_code = spec.best_code();
    for (double a : alphas) {
        auto [xi, T] = xi_and_t_alpha(r.transition, r.states, spec, a);
        r.xi = xi;
        r.t_alpha[a] = T;
    }
    if (alphas.empty()) {
        auto [xi, T] = xi_and_t_alpha(r.transition, r.states, spec, 0.5);
        r.xi = xi;
        (void)T;
    }
    return r;
}

}  // namespace genreg
