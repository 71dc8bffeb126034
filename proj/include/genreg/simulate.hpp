#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"
#include "genreg/ga.hpp"
#include "genreg/gic.hpp"
#include "genreg/inference.hpp"
#include "genreg/init.hpp"
#include "genreg/model_mask.hpp"
#include "genreg/rng.hpp"
#include "genreg/stats.hpp"

namespace genreg {

struct CaseSpec {
    int case_id = 1;
    int n = 200;
    int d = 400;
    int s = 6;
    double rho = 0.5;
    uint64_t seed = 0;

    void validate() const {
        if (case_id < 1 || case_id > 6)
            throw ConfigError("CaseSpec: case_id must be 1..6");
        if (n < 2) throw ConfigError("CaseSpec: n must be at least 2");
        if (d < 1) throw ConfigError("CaseSpec: d must be positive");
        if (s < 1 || s > std::min(n, d))
            throw ConfigError("CaseSpec: need 1 <= s <= min(n, d)");
        if (!(rho >= 0.0 && rho < 1.0))
            throw ConfigError("CaseSpec: rho must lie in [0, 1)");
        if (case_id <= 4 && d < s + 2)
            throw ConfigError("CaseSpec: cases 1-4 require d >= s + 2");
        if ((case_id == 1 || case_id == 2) && s < 3)
            throw ConfigError("CaseSpec: cases 1-2 require s >= 3");
        if ((case_id == 3 || case_id == 4) && s < 4)
            throw ConfigError("CaseSpec: cases 3-4 require s >= 4");
    }
};

struct GeneratedData {
    Dataset dataset;
    ModelMask truth;
    Eigen::VectorXd beta;
};

// Rows i.i.d. N(0, Sigma) with Toeplitz Sigma_kl = rho^|k-l|, built by the
// AR(1) recursion across columns.
inline Eigen::MatrixXd toeplitz_gaussian_rows(int n, int d, double rho,
                                              Rng& rng) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw ConfigError("toeplitz_gaussian_rows: rho must lie in [0, 1)");
    Eigen::MatrixXd X(n, d);
    const double scale = std::sqrt(1.0 - rho * rho);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = rng.normal();
        for (int j = 1; j < d; ++j)
            X(i, j) = rho * X(i, j - 1) + scale * rng.normal();
    }
    return X;
}

// Builds one simulation scenario: Toeplitz predictors, the case's column
// redefinitions, its coefficient vector, and Y = X beta + N(0, I) noise.
// Substreams are keyed (seed, case_id, purpose) so the raw predictor draw
// is unaffected by how many redefinition or coefficient draws follow.
inline GeneratedData generate_case(const CaseSpec& spec) {
    spec.validate();
    const int n = spec.n, d = spec.d, s = spec.s;

    Rng rng_x = Rng::keyed(spec.seed, uint64_t(spec.case_id), 1);
    Rng rng_eta = Rng::keyed(spec.seed, uint64_t(spec.case_id), 2);
    Rng rng_beta = Rng::keyed(spec.seed, uint64_t(spec.case_id), 3);
    Rng rng_eps = Rng::keyed(spec.seed, uint64_t(spec.case_id), 4);

    Eigen::MatrixXd X = toeplitz_gaussian_rows(n, d, spec.rho, rng_x);

    if (spec.case_id == 2) {
        // X_{s+1} = 0.5 X_1 + 2 X_{s-2} + eta, eta ~ N(0, 0.01)
        for (int i = 0; i < n; ++i)
            X(i, s) = 0.5 * X(i, 0) + 2.0 * X(i, s - 3) + 0.1 * rng_eta.normal();
    } else if (spec.case_id == 3 || spec.case_id == 4) {
        // X_{s+1} and X_{s+2} become noisy averages of leading predictors,
        // scaled so their marginal variance stays 1.
        const double c = 2.0 / (3.0 * std::sqrt(1.0 + spec.rho));
        for (int i = 0; i < n; ++i)
            X(i, s) = c * (X(i, 0) + X(i, 1)) + rng_eta.normal() / 3.0;
        for (int i = 0; i < n; ++i)
            X(i, s + 1) = c * (X(i, 2) + X(i, 3)) + rng_eta.normal() / 3.0;
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    switch (spec.case_id) {
        case 1:
        case 2:
            for (int j = 0; j < s - 2; ++j) beta[j] = 4.0;
            beta[s - 2] = -6.0 * std::sqrt(2.0);
            beta[s - 1] = 4.0 / 3.0;
            break;
        case 3:
            for (int j = 0; j < s; ++j) beta[j] = 3.0;
            break;
        case 4:
        case 6: {
            const double b = 3.0 * std::log(double(n)) / std::sqrt(double(n));
            for (int j = 0; j < s; ++j) beta[j] = b;
            break;
        }
        case 5: {
            std::vector<double> draws(static_cast<size_t>(s));
            for (int j = 0; j < s; ++j) draws[size_t(j)] = rng_beta.uniform(0.5, 1.5);
            std::sort(draws.begin(), draws.end(), std::greater<double>());
            for (int j = 0; j < s; ++j) beta[j] = draws[size_t(j)];
            break;
        }
        default:
            break;
    }

    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps[i] = rng_eps.normal();

    GeneratedData out{Dataset{}, ModelMask(d), beta};
    out.dataset.X = std::move(X);
    out.dataset.Y = out.dataset.X * beta + eps;
    out.dataset.column_names.resize(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j)
        out.dataset.column_names[size_t(j)] = "x" + std::to_string(j + 1);
    for (int j = 0; j < s; ++j) out.truth.set(j, true);
    return out;
}

struct ExperimentConfig {
    std::vector<CaseSpec> cases;  // per-case seed fields are overwritten
    int replicates = 20;
    uint64_t master_seed = 0;
    GaConfig ga;
    InitConfig init;
    GicConfig gic_overrides;  // kappa_n <= 0 means per-dataset default
    double sms_alpha = 0.05;
    int sms_resamples = 1000;
};

struct MetricRow {
    int case_id = 0;
    int replicate = 0;
    std::string metric;
    double value = 0.0;
};

struct MetricAggregate {
    int case_id = 0;
    std::string metric;
    double mean = 0.0;
    double sd = 0.0;  // sample sd; 0 for a single replicate
    int count = 0;
};

struct SoilRow {
    int case_id = 0;
    int replicate = 0;
    int variable = 0;  // 1-based
    double value = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<MetricRow> rows;
    std::vector<MetricAggregate> aggregates;
    std::vector<SoilRow> soil_rows;
};

namespace detail {

inline void aggregate_metrics(ExperimentReport& report) {
    for (size_t i = 0; i < report.rows.size(); ++i) {
        const MetricRow& row = report.rows[i];
        MetricAggregate* agg = nullptr;
        for (MetricAggregate& a : report.aggregates)
            if (a.case_id == row.case_id && a.metric == row.metric) {
                agg = &a;
                break;
            }
        if (!agg) {
            report.aggregates.push_back({row.case_id, row.metric, 0, 0, 0});
            agg = &report.aggregates.back();
        }
        ++agg->count;
    }
    for (MetricAggregate& a : report.aggregates) {
        std::vector<double> vals;
        for (const MetricRow& row : report.rows)
            if (row.case_id == a.case_id && row.metric == a.metric)
                vals.push_back(row.value);
        a.mean = mean_of(vals);
        a.sd = vals.size() > 1 ? std::sqrt(variance_of(vals)) : 0.0;
    }
}

}  // namespace detail

// One full seeded pipeline per (case, replicate): generate, initialize,
// run the GA, then score the final population with the inference layer.
inline ExperimentReport run_experiment(const ExperimentConfig& config_in) {
    ExperimentConfig config = config_in;
    if (config.cases.empty())
        throw ConfigError("run_experiment: no cases configured");
    if (config.replicates < 1)
        throw ConfigError("run_experiment: replicates must be positive");
    for (const CaseSpec& c : config.cases) c.validate();

    ExperimentReport report;
    for (CaseSpec base : config.cases) {
        for (int rep = 0; rep < config.replicates; ++rep) {
            CaseSpec spec = base;
            spec.seed = mix_keys(config.master_seed, uint64_t(spec.case_id),
                                 uint64_t(rep));
            GeneratedData gen = generate_case(spec);
            const Dataset& data = gen.dataset;

            GicConfig gcfg = default_gic_config(data);
            if (config.gic_overrides.kappa_n > 0.0)
                gcfg.kappa_n = config.gic_overrides.kappa_n;

            GaConfig gacfg = config.ga;
            gacfg.seed = mix_keys(spec.seed, 0x6761ULL);

            auto t0 = std::chrono::steady_clock::now();
            FitnessLedger ledger;
            Population initial = build_initial_population(
                data, config.init, gacfg, gcfg, ledger);
            GaResult ga = run_ga(data, gacfg, initial, gcfg, ledger);
            auto t1 = std::chrono::steady_clock::now();
            double seconds =
                std::chrono::duration<double>(t1 - t0).count();

            std::vector<ModelMask> pool;
            for (const Member& m : ga.final_population.members)
                pool.push_back(m.mask);
            CandidateSet cands = make_candidate_set(data, pool, gcfg);

            auto [psr, fdr] = psr_fdr(ga.best, gen.truth);
            double mean_fit = mean_of(ga.final_population.fitnesses());

            SmsResult sms = survival_model_set(
                data, cands, gcfg, config.sms_alpha, config.sms_resamples,
                mix_keys(spec.seed, 0x736d73ULL));
            double ratio = double(sms.survivors.size()) /
                           double(cands.masks.size());

            Eigen::VectorXd mu = data.X * gen.beta;
            WeightVector wg = gic_weights(cands.gics);
            double rmse_g = rmse(mu, model_average_predict(data, cands, wg));
            double rmse_a = 0.0;
            try {
                WeightVector wa = al_weights(data, cands);
                rmse_a = rmse(mu, model_average_predict(data, cands, wa));
            } catch (const LeverageOne&) {
                rmse_a = std::numeric_limits<double>::quiet_NaN();
            }

            std::vector<double> importance = soil(cands, wg);
            for (int j = 0; j < data.d(); ++j)
                report.soil_rows.push_back(
                    {spec.case_id, rep, j + 1, importance[size_t(j)]});

            auto push = [&](const std::string& name, double value) {
                report.rows.push_back({spec.case_id, rep, name, value});
            };
            push("psr", psr);
            push("fdr", fdr);
            push("mean_final_fitness", mean_fit);
            push("sms_ratio", ratio);
            push("rmse_gic", rmse_g);
            push("rmse_al", rmse_a);
            push("wall_seconds", seconds);
            push("generations", double(ga.generations_run));
            push("models_evaluated", double(ga.models_evaluated));
        }
    }
    report.config = config;
    detail::aggregate_metrics(report);
    return report;
}

}  // namespace genreg
