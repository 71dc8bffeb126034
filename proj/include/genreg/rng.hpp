#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "genreg/errors.hpp"

namespace genreg {

// splitmix64 finalizer; used to mix (seed, stream, substream) keys into
// engine seeds so that independently keyed streams never share state.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_keys(uint64_t a, uint64_t b = 0, uint64_t c = 0,
                         uint64_t e = 0) {
    uint64_t h = splitmix64(a);
    h = splitmix64(h ^ splitmix64(b + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ splitmix64(c + 0x9e3779b97f4a7c15ULL));
    h = splitmix64(h ^ splitmix64(e + 0xd6e8feb86659fd93ULL));
    return h;
}

// Deterministic random stream. The engine is std::mt19937_64 (its output
// sequence is fixed by the standard); every distribution below is
// implemented by hand so draws are bit-identical across platforms.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed ? seed : 0x1234567887654321ULL) {}

    // Stream keyed by up to four integers, e.g. (seed, generation, slot).
    static Rng keyed(uint64_t a, uint64_t b = 0, uint64_t c = 0,
                     uint64_t e = 0) {
        return Rng(mix_keys(a, b, c, e));
    }

    uint64_t next_u64() { return eng_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased integer on [0, n) by rejection.
    uint64_t below(uint64_t n) {
        if (n == 0) throw ConfigError("Rng::below: empty range");
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Marsaglia polar; caches the spare deviate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // Index draw proportional to non-negative weights (inverse CDF).
    int categorical(const std::vector<double>& w) {
        double total = 0.0;
        for (double x : w) {
            if (!(x >= 0.0))
                throw NumericError("Rng::categorical: negative weight");
            total += x;
        }
        if (total <= 0.0)
            throw NumericError("Rng::categorical: zero total weight");
        double u = uniform01() * total;
        double acc = 0.0;
        for (size_t i = 0; i < w.size(); ++i) {
            acc += w[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(w.size()) - 1;
    }

    // Hypergeometric(N, M, n): draws from an urn with N balls of which M
    // are marked, taking n without replacement; returns the marked count.
    // Exact inverse-CDF walk over the support, pmf by log factorials.
    int hypergeometric(int N, int M, int n) {
        if (N < 0 || M < 0 || n < 0 || M > N || n > N)
            throw ConfigError("Rng::hypergeometric: invalid parameters");
        int lo = std::max(0, n + M - N);
        int hi = std::min(n, M);
        double u = uniform01();
        double acc = 0.0;
        for (int k = lo; k <= hi; ++k) {
            acc += std::exp(log_choose(M, k) + log_choose(N - M, n - k) -
                            log_choose(N, n));
            if (u < acc) return k;
        }
        return hi;
    }

    // k distinct indices from {0..n-1} sampled sequentially with
    // probability proportional to w among the remaining indices. Once all
    // remaining weights are zero, draws continue uniformly.
    std::vector<int> weighted_sample_without_replacement(
        std::vector<double> w, int k) {
        int n = static_cast<int>(w.size());
        if (k > n)
            throw ConfigError(
                "weighted_sample_without_replacement: k exceeds population");
        std::vector<bool> taken(w.size(), false);
        std::vector<int> out;
        out.reserve(static_cast<size_t>(k));
        for (int draw = 0; draw < k; ++draw) {
            double total = 0.0;
            for (double x : w) total += x;
            int idx;
            if (total > 0.0) {
                idx = categorical(w);
            } else {
                uint64_t r = below(static_cast<uint64_t>(n - draw));
                idx = 0;
                for (int j = 0;; ++j) {
                    if (!taken[static_cast<size_t>(j)]) {
                        if (r == 0) {
                            idx = j;
                            break;
                        }
                        --r;
                    }
                }
            }
            out.push_back(idx);
            taken[static_cast<size_t>(idx)] = true;
            w[static_cast<size_t>(idx)] = 0.0;
        }
        return out;
    }

    static double log_choose(int n, int k) {
        if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
        return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
               std::lgamma(n - k + 1.0);
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace genreg
