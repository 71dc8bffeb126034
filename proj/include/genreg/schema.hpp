#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "genreg/errors.hpp"
#include "genreg/ga.hpp"
#include "genreg/model_mask.hpp"

namespace genreg {

// Ternary pattern over positions: 0, 1, or wildcard.
class Schema {
  public:
    static constexpr int8_t kWild = -1;

    Schema() = default;

    explicit Schema(std::vector<int8_t> pattern)
        : pattern_(std::move(pattern)) {
        for (int8_t c : pattern_)
            if (c != 0 && c != 1 && c != kWild)
                throw ConfigError("Schema: entries must be 0, 1, or wildcard");
    }

    // Parses strings over {0, 1, *}.
    static Schema from_string(const std::string& s) {
        std::vector<int8_t> p;
        p.reserve(s.size());
        for (char c : s) {
            if (c == '0')
                p.push_back(0);
            else if (c == '1')
                p.push_back(1);
            else if (c == '*')
                p.push_back(kWild);
            else
                throw ConfigError("Schema: invalid character '" +
                                  std::string(1, c) + "'");
        }
        return Schema(std::move(p));
    }

    std::string to_string() const {
        std::string s;
        s.reserve(pattern_.size());
        for (int8_t c : pattern_)
            s.push_back(c == kWild ? '*' : (c ? '1' : '0'));
        return s;
    }

    int dimension() const { return static_cast<int>(pattern_.size()); }
    bool is_fixed(int j) const { return pattern_[size_t(j)] != kWild; }
    int fixed_bit(int j) const { return pattern_[size_t(j)]; }

  private:
    std::vector<int8_t> pattern_;
};

inline int schema_order(const Schema& h) {
    int c = 0;
    for (int j = 0; j < h.dimension(); ++j)
        if (h.is_fixed(j)) ++c;
    return c;
}

// Number of masks matching the schema, 2^(d - order).
inline uint64_t expansion_count(const Schema& h) {
    int free_positions = h.dimension() - schema_order(h);
    if (free_positions > 63)
        throw TooLarge("expansion_count: exceeds 64-bit range");
    return uint64_t(1) << free_positions;
}

inline bool matches(const ModelMask& u, const Schema& h) {
    if (u.dimension() != h.dimension())
        throw ConfigError("matches: length mismatch");
    for (int j = 0; j < u.dimension(); ++j)
        if (h.is_fixed(j) && int(u.test(j)) != h.fixed_bit(j)) return false;
    return true;
}

// delta(u, v): disagreements over all positions.
inline int hamming(const ModelMask& u, const ModelMask& v) {
    if (u.dimension() != v.dimension())
        throw ConfigError("hamming: length mismatch");
    int c = 0;
    for (int j = 0; j < u.dimension(); ++j)
        if (u.test(j) != v.test(j)) ++c;
    return c;
}

// delta(u, H): fixed positions of H where u mismatches.
inline int hamming_to_schema(const ModelMask& u, const Schema& h) {
    if (u.dimension() != h.dimension())
        throw ConfigError("hamming_to_schema: length mismatch");
    int c = 0;
    for (int j = 0; j < u.dimension(); ++j)
        if (h.is_fixed(j) && int(u.test(j)) != h.fixed_bit(j)) ++c;
    return c;
}

// delta_H(u, v): disagreements between u and v on fixed positions of H.
inline int hamming_fixed(const ModelMask& u, const ModelMask& v,
                         const Schema& h) {
    if (u.dimension() != v.dimension() || u.dimension() != h.dimension())
        throw ConfigError("hamming_fixed: length mismatch");
    int c = 0;
    for (int j = 0; j < u.dimension(); ++j)
        if (h.is_fixed(j) && u.test(j) != v.test(j)) ++c;
    return c;
}

// h_kl: fixed positions where both parents agree and differ from H.
inline int h_kl(const ModelMask& u, const ModelMask& v, const Schema& h) {
    if (u.dimension() != v.dimension() || u.dimension() != h.dimension())
        throw ConfigError("h_kl: length mismatch");
    int c = 0;
    for (int j = 0; j < u.dimension(); ++j)
        if (h.is_fixed(j) && u.test(j) == v.test(j) &&
            int(u.test(j)) != h.fixed_bit(j))
            ++c;
    return c;
}

// Probability that one parent selection draws a member matching H.
inline double alpha_selection(const Population& pop,
                              const std::vector<double>& weights,
                              const Schema& h) {
    if (weights.size() != pop.members.size())
        throw ConfigError("alpha_selection: weight length mismatch");
    double a = 0.0;
    for (size_t k = 0; k < pop.members.size(); ++k)
        if (matches(pop.members[k].mask, h)) a += weights[k];
    return a;
}

// P(uniform crossover of (uk, ul) followed by rate-pi flips matches H):
// product over fixed positions of q_j (1 - pi) + (1 - q_j) pi with
// q_j = (1(uk_j = H_j) + 1(ul_j = H_j)) / 2. Positions are independent, so
// this is exact; it is the verification primitive shared with the exact
// Markov kernel.
inline double pair_child_match_prob(const ModelMask& uk, const ModelMask& ul,
                                    const Schema& h, double pi_m) {
    double p = 1.0;
    for (int j = 0; j < h.dimension(); ++j) {
        if (!h.is_fixed(j)) continue;
        double q = 0.5 * (double(int(uk.test(j)) == h.fixed_bit(j)) +
                          double(int(ul.test(j)) == h.fixed_bit(j)));
        p *= q * (1.0 - pi_m) + (1.0 - q) * pi_m;
    }
    return p;
}

// Exact probability that a child construction (selection, crossover,
// mutation) yields a member of H: ordered-pair sum of
// w_k w_l pi^{h_kl} (1-pi)^{ord - delta_H - h_kl} / 2^{delta_H}.
inline double alpha_exact(const Population& pop,
                          const std::vector<double>& weights, const Schema& h,
                          double pi_m) {
    const int ord = schema_order(h);
    const int K = pop.size();
    double a = 0.0;
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
            const ModelMask& uk = pop.members[size_t(k)].mask;
            const ModelMask& ul = pop.members[size_t(l)].mask;
            int dh = hamming_fixed(uk, ul, h);
            int both_miss = h_kl(uk, ul, h);
            a += weights[size_t(k)] * weights[size_t(l)] *
                 std::pow(pi_m, both_miss) *
                 std::pow(1.0 - pi_m, ord - dh - both_miss) *
                 std::pow(0.5, dh);
        }
    }
    return a;
}

// The published three-term closed form, evaluated exactly as displayed.
// Known to undercount mixed parent pairs; kept for measuring the
// discrepancy against alpha_exact.
inline double alpha_paper_theorem(const Population& pop,
                                  const std::vector<double>& weights,
                                  const Schema& h, double pi_m) {
    const int ord = schema_order(h);
    const int K = pop.size();
    const double keep = std::pow(1.0 - pi_m, ord);
    double a_sel = alpha_selection(pop, weights, h);

    double term2 = 0.0;
    double term3 = 0.0;
    for (int l = 0; l < K; ++l) {
        const ModelMask& ul = pop.members[size_t(l)].mask;
        if (matches(ul, h)) continue;
        term2 += weights[size_t(l)] * keep /
                 std::pow(2.0 * (1.0 - pi_m), hamming_to_schema(ul, h));
        for (int k = 0; k < K; ++k) {
            const ModelMask& uk = pop.members[size_t(k)].mask;
            if (matches(uk, h)) continue;
            term3 += weights[size_t(k)] * weights[size_t(l)] *
                     std::pow(2.0 * pi_m, h_kl(uk, ul, h)) * keep /
                     std::pow(2.0 * (1.0 - pi_m), hamming_fixed(uk, ul, h));
        }
    }
    return a_sel * a_sel * keep + a_sel * term2 + term3;
}

// Closed-form lower bound, valid for pi_m <= 0.5.
inline double alpha_lower_bound(double alpha_sel, int order, double pi_m) {
    if (pi_m > 0.5)
        throw PiTooLarge("alpha_lower_bound: requires pi_m <= 0.5");
    return std::pow(1.0 - pi_m, order) * alpha_sel * alpha_sel +
           std::pow(2.0, -order) * alpha_sel * (1.0 - alpha_sel) +
           (1.0 - alpha_sel) * (1.0 - alpha_sel) * std::pow(pi_m, order);
}

// Independent oracle for alpha: sums the shared per-position primitive
// over ordered parent pairs.
inline double alpha_oracle(const Population& pop,
                           const std::vector<double>& weights, const Schema& h,
                           double pi_m) {
    const int K = pop.size();
    double a = 0.0;
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
            a += weights[size_t(k)] * weights[size_t(l)] *
                 pair_child_match_prob(pop.members[size_t(k)].mask,
                                       pop.members[size_t(l)].mask, h, pi_m);
    return a;
}

// Per-generation observations of one schema along a GA run.
struct SchemaTrace {
    Schema schema;
    std::vector<int> match_count;         // m(H, t)
    std::vector<double> alpha_sel;        // alpha_sel(H, t)
    std::vector<double> mean_fitness;     // of matching members; NaN if none
};

// Runs the GA through `run` (a callback accepting a GaObserver) and records
// m(H,t), alpha_sel(H,t), and matching-member mean fitness per generation.
inline std::vector<SchemaTrace> trace_schemata(
    const std::function<void(const GaObserver&)>& run,
    const std::vector<Schema>& schemata) {
    std::vector<SchemaTrace> traces;
    traces.reserve(schemata.size());
    for (const Schema& h : schemata) traces.push_back({h, {}, {}, {}});

    GaObserver observer = [&](int, const Population& pop,
                              const std::vector<double>& weights) {
        for (SchemaTrace& tr : traces) {
            int m = 0;
            double fit_sum = 0.0;
            for (const Member& mem : pop.members) {
                if (matches(mem.mask, tr.schema)) {
                    ++m;
                    fit_sum += mem.fitness;
                }
            }
            tr.match_count.push_back(m);
            tr.alpha_sel.push_back(alpha_selection(pop, weights, tr.schema));
            tr.mean_fitness.push_back(
                m > 0 ? fit_sum / m
                      : std::numeric_limits<double>::quiet_NaN());
        }
    };
    run(observer);
    return traces;
}

}  // namespace genreg
