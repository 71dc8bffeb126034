// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every threshold is checked against values measured in-process.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genreg/genreg.hpp"

using namespace genreg;

namespace {

struct Gate {
    int failures = 0;

    void report(int id, const std::string& name, bool pass,
                const std::string& detail) {
        std::ostringstream tag;
        tag << "AC-" << std::setfill('0') << std::setw(2) << id;
        std::cout << tag.str() << (pass ? " PASS  " : " FAIL  ") << name
                  << ": " << detail << "\n";
        if (!pass) ++failures;
    }
};

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Eigen::VectorXd loo_column(const Dataset& data, const ModelMask& m) {
    Eigen::MatrixXd Xu = data.submatrix(m);
    Eigen::MatrixXd H =
        Xu * (Xu.transpose() * Xu).fullPivLu().solve(Xu.transpose());
    Eigen::VectorXd fitted = H * data.Y;
    Eigen::VectorXd out(data.n());
    for (int i = 0; i < data.n(); ++i)
        out[i] = (fitted[i] - H(i, i) * data.Y[i]) / (1.0 - H(i, i));
    return out;
}

// Exact minimum of yty - 2 a.w + w'Bw over the step-1e-3 grid on [0,1]^K.
// For K = 3 the third axis is resolved per grid point: the objective is
// convex in w3, so the grid optimum lies at an endpoint or at one of the
// two grid neighbors of the unconstrained minimizer.
double grid_min_objective(const Eigen::MatrixXd& B, const Eigen::VectorXd& a,
                          double yty) {
    const int K = static_cast<int>(a.size());
    const int N = 1000;
    const double h = 1.0 / N;
    double best = std::numeric_limits<double>::infinity();
    if (K == 1) {
        for (int i = 0; i <= N; ++i) {
            double w = i * h;
            best = std::min(best, yty - 2.0 * a[0] * w + B(0, 0) * w * w);
        }
        return best;
    }
    if (K == 2) {
        for (int i = 0; i <= N; ++i) {
            double w0 = i * h;
            double c0 = yty - 2.0 * a[0] * w0 + B(0, 0) * w0 * w0;
            for (int j = 0; j <= N; ++j) {
                double w1 = j * h;
                double f = c0 - 2.0 * a[1] * w1 + B(1, 1) * w1 * w1 +
                           2.0 * B(0, 1) * w0 * w1;
                best = std::min(best, f);
            }
        }
        return best;
    }
    for (int i = 0; i <= N; ++i) {
        double w0 = i * h;
        double c0 = yty - 2.0 * a[0] * w0 + B(0, 0) * w0 * w0;
        for (int j = 0; j <= N; ++j) {
            double w1 = j * h;
            double c1 = c0 - 2.0 * a[1] * w1 + B(1, 1) * w1 * w1 +
                        2.0 * B(0, 1) * w0 * w1;
            double lin = -2.0 * a[2] + 2.0 * (B(0, 2) * w0 + B(1, 2) * w1);
            double cand[4] = {0.0, 1.0, 0.0, 1.0};
            int ncand = 2;
            if (B(2, 2) > 0.0) {
                double w2s =
                    std::clamp(-lin / (2.0 * B(2, 2)), 0.0, 1.0);
                cand[2] = std::floor(w2s * N) * h;
                cand[3] = std::min(1.0, cand[2] + h);
                ncand = 4;
            }
            for (int c = 0; c < ncand; ++c) {
                double w2 = cand[c];
                double f = c1 + lin * w2 + B(2, 2) * w2 * w2;
                best = std::min(best, f);
            }
        }
    }
    return best;
}

double box_kkt_residual(const Eigen::MatrixXd& B, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& w) {
    Eigen::VectorXd g = 2.0 * (B * w - a);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        double r;
        if (w[k] <= 0.0)
            r = std::max(-g[k], 0.0);
        else if (w[k] >= 1.0)
            r = std::max(g[k], 0.0);
        else
            r = std::fabs(g[k]);
        worst = std::max(worst, r);
    }
    return worst;
}

struct FlagshipResults {
    int exact_hits = 0;
    double median_generations = 0.0;
    long long max_models = 0;
    double max_seconds = 0.0;
    bool reference_always_survived = true;
    int ratio_hits = 0;
    double min_ratio = 1.0;
};

// Criterion 1 and criterion 9 share these 20 replicates.
FlagshipResults run_flagship() {
    FlagshipResults out;
    const uint64_t master = 20260815ULL;
    std::vector<double> gens;
    for (int rep = 0; rep < 20; ++rep) {
        CaseSpec spec{1, 200, 400, 6, 0.5,
                      mix_keys(master, 1, uint64_t(rep))};
        GeneratedData gen = generate_case(spec);
        const Dataset& data = gen.dataset;
        GicConfig gcfg = default_gic_config(data);

        GaConfig gacfg;  // auto K = 92, auto pi_m = 1/d, adaptive mutation
        gacfg.seed = mix_keys(spec.seed, 0x6761ULL);

        auto t0 = std::chrono::steady_clock::now();
        FitnessLedger ledger;
        Population initial =
            build_initial_population(data, InitConfig{}, gacfg, gcfg, ledger);
        GaResult ga = run_ga(data, gacfg, initial, gcfg, ledger);
        auto t1 = std::chrono::steady_clock::now();

        out.max_seconds = std::max(
            out.max_seconds, std::chrono::duration<double>(t1 - t0).count());
        out.max_models = std::max(out.max_models, ga.models_evaluated);
        gens.push_back(double(ga.generations_run));
        if (ga.best == gen.truth) ++out.exact_hits;

        std::vector<ModelMask> pool;
        for (const Member& m : ga.final_population.members)
            pool.push_back(m.mask);
        CandidateSet cands = make_candidate_set(data, pool, gcfg);
        SmsResult sms =
            survival_model_set(data, cands, gcfg, 0.05, 400,
                               mix_keys(spec.seed, 0x736d73ULL));
        bool found = false;
        for (int s : sms.survivors)
            if (s == cands.best_index) found = true;
        out.reference_always_survived =
            out.reference_always_survived && found;
        double ratio =
            double(sms.survivors.size()) / double(cands.masks.size());
        out.min_ratio = std::min(out.min_ratio, ratio);
        if (ratio >= 0.5) ++out.ratio_hits;
    }
    out.median_generations = median_of(gens);
    return out;
}

}  // namespace

int main() {
    std::cout << std::setprecision(6);
    Gate gate;
    auto suite_start = std::chrono::steady_clock::now();

    // ---- criterion 1 (and data for criterion 9) --------------------------
    FlagshipResults flag = run_flagship();
    {
        bool pass = flag.exact_hits >= 18 && flag.median_generations <= 40.0 &&
                    flag.max_models <= 5000 && flag.max_seconds <= 60.0;
        std::ostringstream d;
        d << flag.exact_hits << "/20 exact recoveries, median generations "
          << flag.median_generations << ", max models evaluated "
          << flag.max_models << ", max " << flag.max_seconds << " s per run";
        gate.report(1, "true-model recovery at (200,400,6,0.5)", pass,
                    d.str());
    }

    // ---- criterion 2 -----------------------------------------------------
    {
        int k_star = min_population_size(1000, 0.9999);
        int auto_k = auto_population_size(400);
        bool pass = k_star == 25 && auto_k == 92;
        std::ostringstream d;
        d << "d=1000 -> K*=" << k_star << " (want 25), d=400 -> auto K="
          << auto_k << " (want 92)";
        gate.report(2, "population-size formula", pass, d.str());
    }

    // ---- criterion 3 -----------------------------------------------------
    {
        const double pis[4] = {0.0, 0.1, 0.3, 0.5};
        double max_gap = 0.0;
        bool bound_ok = true;
        for (uint64_t i = 0; i < 200; ++i) {
            Rng rng = Rng::keyed(0xa1fa, i);
            int d = 1 + int(rng.below(6));
            int K = 2 + int(rng.below(7));
            std::string pattern;
            for (int j = 0; j < d; ++j) {
                uint64_t c = rng.below(3);
                pattern += c == 0 ? '0' : (c == 1 ? '1' : '*');
            }
            Schema h = Schema::from_string(pattern);
            Population pop;
            std::vector<double> w(static_cast<size_t>(K), 0.0);
            double total = 0.0;
            for (int k = 0; k < K; ++k) {
                ModelMask m(d);
                for (int j = 0; j < d; ++j) m.set(j, rng.bernoulli(0.5));
                pop.members.push_back({m, 0.0});
                w[size_t(k)] = rng.uniform(0.1, 1.0);
                total += w[size_t(k)];
            }
            for (double& x : w) x /= total;
            double pi = pis[i % 4];
            double exact = alpha_exact(pop, w, h, pi);
            double oracle = alpha_oracle(pop, w, h, pi);
            max_gap = std::max(max_gap, std::fabs(exact - oracle));
            double lb =
                alpha_lower_bound(alpha_selection(pop, w, h),
                                  schema_order(h), pi);
            if (lb > exact + 1e-12) bound_ok = false;
        }

        Population fix;
        fix.members.push_back({ModelMask::from_string("0"), 0.0});
        fix.members.push_back({ModelMask::from_string("1"), 0.0});
        std::vector<double> wfix{0.5, 0.5};
        Schema h1 = Schema::from_string("1");
        double fix_exact0 = alpha_exact(fix, wfix, h1, 0.0);
        double fix_exact5 = alpha_exact(fix, wfix, h1, 0.5);
        double fix_literal = alpha_paper_theorem(fix, wfix, h1, 0.0);

        bool pass = max_gap <= 1e-12 && bound_ok &&
                    std::fabs(fix_exact0 - 0.5) <= 1e-15 &&
                    std::fabs(fix_exact5 - 0.5) <= 1e-15 &&
                    std::fabs(fix_literal - 0.375) <= 1e-15;
        std::ostringstream d;
        d << "max |exact-oracle| " << max_gap << " over 200 instances, bound "
          << (bound_ok ? "holds" : "VIOLATED")
          << "; 1-bit fixture exact " << fix_exact0
          << " vs printed-law value " << fix_literal << " (gap "
          << fix_exact0 - fix_literal << ")";
        gate.report(3, "one-step schema law vs oracle", pass, d.str());
    }

    // ---- criterion 4 -----------------------------------------------------
    {
        auto t0 = std::chrono::steady_clock::now();
        Population pop;
        std::vector<std::string> masks{"10000", "11000", "10100",
                                       "00111", "01010", "10110"};
        std::vector<double> fits{-10.0, -8.0, -9.0, -12.0, -11.0, -8.5};
        for (size_t k = 0; k < masks.size(); ++k)
            pop.members.push_back({ModelMask::from_string(masks[k]), fits[k]});
        std::vector<double> w = selection_weights(fits);
        Schema h = Schema::from_string("1*0**");
        const double pi = 0.1;
        const int K = pop.size();
        double alpha = alpha_exact(pop, w, h, pi);

        GaConfig cfg;
        cfg.mutation_kind = MutationKind::uniform;
        cfg.mutation_rate = pi;
        std::vector<double> gamma(5, 1.0);
        Rng rng = Rng::keyed(0xac04);
        const int R = 10000;
        long long match_total = 0;
        for (int r = 0; r < R; ++r)
            for (int k = 0; k < K - 1; ++k)
                if (matches(breed_child(pop, w, cfg, gamma, rng), h))
                    ++match_total;
        double mean = double(match_total) / R;
        double expect = (K - 1) * alpha;
        double se = std::sqrt((K - 1) * alpha * (1.0 - alpha) / R);
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();

        bool pass = std::fabs(mean - expect) <= 3.0 * se && secs <= 30.0;
        std::ostringstream d;
        d << "mean matches/step " << mean << " vs expected " << expect
          << " (3 se = " << 3.0 * se << ", " << R << " replays, " << secs
          << " s)";
        gate.report(4, "one-step match-count dynamics", pass, d.str());
    }

    // ---- criteria 5 and 6 ------------------------------------------------
    ChainSpec chain{2, 2, 0.2, {1.0, 3.7, 2.2, 5.9}};
    ChainResult analysis = analyze_chain(chain, {0.1});
    {
        double row_err = 0.0;
        for (Eigen::Index i = 0; i < analysis.transition.rows(); ++i)
            row_err = std::max(
                row_err, std::fabs(analysis.transition.row(i).sum() - 1.0));
        std::vector<bool> in_mmax(analysis.states.size(), false);
        for (int i : analysis.m_max) in_mmax[size_t(i)] = true;
        double mmax_mass = 0.0, off_max = 0.0, mmax_min = 1.0;
        for (size_t i = 0; i < analysis.states.size(); ++i) {
            double p = analysis.stationary[Eigen::Index(i)];
            if (in_mmax[i]) {
                mmax_mass += p;
                mmax_min = std::min(mmax_min, p);
            } else {
                off_max = std::max(off_max, p);
            }
        }

        bool monotone = true;
        Rng rng = Rng::keyed(0xac05);
        for (int t = 0; t < 200 && monotone; ++t) {
            ChainState state = analysis.states[size_t(t) %
                                               analysis.states.size()];
            auto best_fit = [&](const ChainState& s) {
                double b = -std::numeric_limits<double>::infinity();
                for (int c : s)
                    b = std::max(b, chain.fitness_table[size_t(c)]);
                return b;
            };
            double cur = best_fit(state);
            for (int step = 0; step < 30; ++step) {
                state = simulate_step(state, chain, rng);
                double nxt = best_fit(state);
                if (nxt < cur) monotone = false;
                cur = nxt;
            }
        }

        bool pass = row_err <= 1e-12 && mmax_mass >= 1.0 - 1e-8 &&
                    mmax_min > 0.0 && off_max <= 1e-8 && monotone;
        std::ostringstream d;
        d << "max row-sum error " << row_err << ", best-state mass "
          << mmax_mass << " (min member " << mmax_min
          << ", max other " << off_max << "), elitism "
          << (monotone ? "monotone" : "VIOLATED")
          << " on 200 trajectories";
        gate.report(5, "exact chain absorbs at the best state", pass,
                    d.str());
    }
    {
        auto t0 = std::chrono::steady_clock::now();
        int T = analysis.t_alpha.at(0.1);
        Rng rng = Rng::keyed(0xac06);
        const int R = 2000;
        int hits = 0;
        for (int r = 0; r < R; ++r) {
            ChainState state =
                analysis.states[size_t(r) % analysis.states.size()];
            for (int step = 0; step < T; ++step)
                state = simulate_step(state, chain, rng);
            for (int c : state)
                if (c == analysis.best_code) {
                    ++hits;
                    break;
                }
        }
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();
        double frac = double(hits) / R;
        bool pass = frac >= 0.9 && secs <= 60.0;
        std::ostringstream d;
        d << "xi " << analysis.xi << ", T(0.1) = " << T
          << ", empirical hit rate " << frac << " over " << R << " runs ("
          << secs << " s)";
        gate.report(6, "stopping-horizon coverage", pass, d.str());
    }

    // ---- criterion 7 -----------------------------------------------------
    {
        double max_obj_gap = 0.0, max_resid = 0.0;
        bool all_ok = true;
        for (uint64_t i = 0; i < 50; ++i) {
            Rng rng = Rng::keyed(0xa1c7, i);
            Dataset data;
            const int n = 25, d = 4;
            data.X.resize(n, d);
            data.Y.resize(n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < d; ++c) data.X(r, c) = rng.normal();
            for (int r = 0; r < n; ++r) data.Y[r] = rng.normal();
            data.Y *= 0.1 / data.Y.norm();
            data.column_names = {"a", "b", "c", "e"};
            GicConfig gcfg = default_gic_config(data);

            CandidateSet cs;
            if (i == 0) {
                // duplicated candidate: singular Gram matrix
                cs.masks = {ModelMask::from_string("1000"),
                            ModelMask::from_string("1000"),
                            ModelMask::from_string("0110")};
            } else {
                int K = 1 + int(i % 3);
                std::vector<uint64_t> codes;
                while (int(codes.size()) < K) {
                    uint64_t c = 1 + rng.below(15);
                    bool seen = false;
                    for (uint64_t x : codes) seen = seen || x == c;
                    if (!seen) codes.push_back(c);
                }
                for (uint64_t c : codes) {
                    ModelMask m(d);
                    for (int j = 0; j < d; ++j) m.set(j, (c >> j) & 1);
                    cs.masks.push_back(m);
                }
            }
            for (const ModelMask& m : cs.masks)
                cs.gics.push_back(gic(data, m, gcfg));
            cs.best_index = 0;
            for (size_t k = 1; k < cs.gics.size(); ++k)
                if (cs.gics[k] < cs.gics[size_t(cs.best_index)])
                    cs.best_index = int(k);

            WeightVector wv = al_weights(data, cs);
            const int K = int(cs.masks.size());
            Eigen::MatrixXd L(n, K);
            for (int k = 0; k < K; ++k)
                L.col(k) = loo_column(data, cs.masks[size_t(k)]);
            Eigen::MatrixXd B = L.transpose() * L;
            Eigen::VectorXd a = L.transpose() * data.Y;
            Eigen::VectorXd w(K);
            for (int k = 0; k < K; ++k) w[k] = wv.w[size_t(k)];

            double obj = (data.Y - L * w).squaredNorm();
            double grid = grid_min_objective(B, a, data.Y.squaredNorm());
            double gap = std::fabs(obj - grid);
            double resid = box_kkt_residual(B, a, w);
            max_obj_gap = std::max(max_obj_gap, gap);
            max_resid = std::max(max_resid, resid);
            if (gap > 1e-6 || resid > 1e-8) all_ok = false;
        }
        std::ostringstream d;
        d << "max |objective - grid oracle| " << max_obj_gap
          << " (tol 1e-6), max stationarity residual " << max_resid
          << " (tol 1e-8) over 50 instances";
        gate.report(7, "averaging weights match the grid oracle", all_ok,
                    d.str());
    }

    // ---- criterion 8 -----------------------------------------------------
    {
        double max_shift_dev = 0.0;
        bool argmax_ok = true;
        for (uint64_t i = 0; i < 100; ++i) {
            Rng rng = Rng::keyed(0xa1c8, i);
            int K = 2 + int(rng.below(9));
            std::vector<double> gics(static_cast<size_t>(K), 0.0);
            for (double& g : gics) g = rng.uniform(0.0, 50.0);

            WeightVector w = gic_weights(gics);
            size_t argmax = 0, argmin = 0;
            for (size_t k = 1; k < size_t(K); ++k) {
                if (w.w[k] > w.w[argmax]) argmax = k;
                if (gics[k] < gics[argmin]) argmin = k;
            }
            if (argmax != argmin) argmax_ok = false;

            for (double shift : {1.0, -7.5, 100.0}) {
                std::vector<double> moved = gics;
                for (double& g : moved) g += shift;
                WeightVector w2 = gic_weights(moved);
                std::vector<double> fit(gics.begin(), gics.end());
                std::vector<double> fit2(moved.begin(), moved.end());
                std::vector<double> s1 = selection_weights(fit);
                std::vector<double> s2 = selection_weights(fit2);
                for (size_t k = 0; k < size_t(K); ++k) {
                    max_shift_dev = std::max(
                        max_shift_dev, std::fabs(w.w[k] - w2.w[k]));
                    max_shift_dev = std::max(max_shift_dev,
                                             std::fabs(s1[k] - s2[k]));
                }
            }
        }
        bool pass = max_shift_dev <= 1e-12 && argmax_ok;
        std::ostringstream d;
        d << "max shift deviation " << max_shift_dev
          << " (tol 1e-12), argmax(weights)=argmin(criterion) "
          << (argmax_ok ? "on all 100 vectors" : "VIOLATED");
        gate.report(8, "weight invariances", pass, d.str());
    }

    // ---- criterion 9 (measured during the criterion-1 replicates) --------
    {
        bool pass = flag.reference_always_survived && flag.ratio_hits >= 15;
        std::ostringstream d;
        d << "reference model survived in all replicates: "
          << (flag.reference_always_survived ? "yes" : "NO") << "; ratio >= "
             "0.5 in " << flag.ratio_hits << "/20 (min ratio "
          << flag.min_ratio << ")";
        gate.report(9, "survival-set sanity on GA candidates", pass, d.str());
    }

    // ---- criterion 10 ----------------------------------------------------
    {
        const int d = 12, codes = 1 << d;
        int brute_matches = 0;
        double max_value_gap = 0.0;
        for (uint64_t rep = 0; rep < 20; ++rep) {
            Rng rng = Rng::keyed(0xac10, rep);
            const int n = 80;
            Dataset data;
            data.X = toeplitz_gaussian_rows(n, d, 0.3, rng);
            data.Y.resize(n);
            Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
            std::vector<int> pos;
            while (pos.size() < 3) {
                int p = int(rng.below(d));
                bool seen = false;
                for (int q : pos) seen = seen || q == p;
                if (!seen) pos.push_back(p);
            }
            beta[pos[0]] = 2.0;
            beta[pos[1]] = -2.0;
            beta[pos[2]] = 1.5;
            for (int i = 0; i < n; ++i)
                data.Y[i] = data.X.row(i).dot(beta) + rng.normal();
            data.column_names.resize(d);
            for (int j = 0; j < d; ++j)
                data.column_names[size_t(j)] = "x" + std::to_string(j + 1);
            GicConfig gcfg = default_gic_config(data);

            // independent recomputation of the criterion and tie-break
            ModelMask arg(d);
            double best_val = std::numeric_limits<double>::infinity();
            std::vector<ModelMask> all;
            all.reserve(size_t(codes));
            for (int c = 0; c < codes; ++c) {
                ModelMask m(d);
                for (int j = 0; j < d; ++j) m.set(j, (c >> j) & 1);
                all.push_back(m);
                double rss = fit_least_squares(data, m).rss;
                double val =
                    n * std::log(std::max(rss / n, gcfg.sigma2_floor)) +
                    gcfg.kappa_n * m.count();
                if (val < best_val ||
                    (val == best_val && size_lex_less(m, arg))) {
                    best_val = val;
                    arg = m;
                }
            }
            CandidateSet cs = make_candidate_set(data, all, gcfg);
            ModelMask lib_best = best_model(cs);
            if (lib_best == arg) ++brute_matches;
            max_value_gap = std::max(
                max_value_gap,
                std::fabs(cs.gics[size_t(cs.best_index)] - best_val));
        }

        int truth_hits = 0;
        for (uint64_t rep = 0; rep < 20; ++rep) {
            CaseSpec spec{5, 500, 12, 4, 0.5, mix_keys(0xac10b, 5, rep)};
            GeneratedData gen = generate_case(spec);
            GicConfig gcfg = default_gic_config(gen.dataset);
            ModelMask arg(d);
            double best_val = std::numeric_limits<double>::infinity();
            for (int c = 0; c < codes; ++c) {
                ModelMask m(d);
                for (int j = 0; j < d; ++j) m.set(j, (c >> j) & 1);
                double g = gic(gen.dataset, m, gcfg);
                if (g < best_val || (g == best_val && size_lex_less(m, arg))) {
                    best_val = g;
                    arg = m;
                }
            }
            if (arg == gen.truth) ++truth_hits;
        }

        bool pass = brute_matches == 20 && truth_hits >= 18;
        std::ostringstream d2;
        d2 << brute_matches
           << "/20 exact argmin agreements over 4096-model enumerations "
              "(max criterion gap "
           << max_value_gap << "); sparse-truth global minimum in "
           << truth_hits << "/20 seeds";
        gate.report(10, "brute-force best-model agreement", pass, d2.str());
    }

    // ---- criterion 11 ----------------------------------------------------
    {
        double max_budget_dev = 0.0;
        for (uint64_t i = 0; i < 100; ++i) {
            Rng rng = Rng::keyed(0xac11, i);
            int d = 4 + int(rng.below(16));
            ModelMask m(d);
            int active = 0;
            while (active == 0 || active == d) {
                active = 0;
                for (int j = 0; j < d; ++j) {
                    bool b = rng.bernoulli(0.5);
                    m.set(j, b);
                    if (b) ++active;
                }
            }
            std::vector<double> gamma(static_cast<size_t>(d), 0.0);
            for (double& g : gamma) g = rng.uniform(0.0, 1.0);
            double pi = rng.uniform(0.01, 0.3);
            std::vector<double> rates = adaptive_mutation_rates(m, gamma, pi);
            double pos = 0.0, neg = 0.0;
            for (int j = 0; j < d; ++j)
                (m.test(j) ? pos : neg) += rates[size_t(j)];
            max_budget_dev = std::max(
                max_budget_dev, std::fabs(pos - active * pi));
            max_budget_dev = std::max(
                max_budget_dev, std::fabs(neg - (d - active) * pi));
        }

        const int d = 10, R = 200000;
        ModelMask child = ModelMask::from_string("1100110000");
        std::vector<double> gamma{0.9, 0.1, 0.4, 0.8, 0.2,
                                  0.7, 0.05, 0.3, 0.6, 0.5};
        const double pi = 0.05;
        std::vector<double> rates = adaptive_mutation_rates(child, gamma, pi);
        Rng rng = Rng::keyed(0xac11f);
        long long flips_active = 0, flips_inactive = 0;
        for (int r = 0; r < R; ++r) {
            ModelMask out = adaptive_mutation(child, gamma, pi, rng);
            for (int j = 0; j < d; ++j)
                if (out.test(j) != child.test(j))
                    (child.test(j) ? flips_active : flips_inactive)++;
        }
        double var_a = 0.0, var_i = 0.0, exp_a = 0.0, exp_i = 0.0;
        for (int j = 0; j < d; ++j) {
            double p = std::clamp(rates[size_t(j)], 0.0, 1.0);
            if (child.test(j)) {
                exp_a += p;
                var_a += p * (1.0 - p);
            } else {
                exp_i += p;
                var_i += p * (1.0 - p);
            }
        }
        double dev_a = std::fabs(flips_active - R * exp_a) /
                       std::sqrt(R * var_a);
        double dev_i = std::fabs(flips_inactive - R * exp_i) /
                       std::sqrt(R * var_i);

        bool pass = max_budget_dev <= 1e-12 && dev_a <= 3.0 && dev_i <= 3.0;
        std::ostringstream det;
        det << "max pre-clip budget deviation " << max_budget_dev
            << " over 100 pairs; flip-count z-scores " << dev_a
            << " (active), " << dev_i << " (inactive) at " << R << " draws";
        gate.report(11, "adaptive-mutation budget", pass, det.str());
    }

    auto suite_end = std::chrono::steady_clock::now();
    double total = std::chrono::duration<double>(suite_end - suite_start)
                       .count();
    std::cout << "ACCEPTANCE: " << (11 - gate.failures)
              << "/11 criteria passed in " << total << " s\n";
    return gate.failures == 0 ? 0 : 1;
}
