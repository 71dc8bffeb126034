#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"
#include "genreg/gic.hpp"
#include "genreg/least_squares.hpp"
#include "genreg/model_mask.hpp"
#include "genreg/rng.hpp"
#include "genreg/stats.hpp"

namespace genreg {

// Distinct scoreable candidate models with their GIC values. best_index is
// the reference model u#: minimal GIC, ties by smaller size then
// lexicographic bit order.
struct CandidateSet {
    std::vector<ModelMask> masks;
    std::vector<double> gics;
    int best_index = 0;
};

// Deduplicates and drops masks that cannot be scored (|u| >= n or rank
// deficient); dropped mask strings are appended to `dropped` if provided.
inline CandidateSet make_candidate_set(const Dataset& data,
                                       const std::vector<ModelMask>& masks,
                                       const GicConfig& cfg,
                                       std::vector<std::string>* dropped =
                                           nullptr) {
    CandidateSet cs;
    for (const ModelMask& m : masks) {
        if (m.dimension() != data.d())
            throw ConfigError("make_candidate_set: mask length " +
                              std::to_string(m.dimension()) +
                              " does not match " + std::to_string(data.d()) +
                              " predictors");
        bool dup = false;
        for (const ModelMask& seen : cs.masks)
            if (seen == m) {
                dup = true;
                break;
            }
        if (dup) continue;
        try {
            double g = gic(data, m, cfg);
            cs.masks.push_back(m);
            cs.gics.push_back(g);
        } catch (const NumericError&) {
            if (dropped) dropped->push_back(m.to_string());
        }
    }
    if (cs.masks.empty())
        throw ConfigError("make_candidate_set: no scoreable candidates");
    cs.best_index = 0;
    for (size_t k = 1; k < cs.masks.size(); ++k) {
        if (cs.gics[k] < cs.gics[size_t(cs.best_index)] ||
            (cs.gics[k] == cs.gics[size_t(cs.best_index)] &&
             size_lex_less(cs.masks[k], cs.masks[size_t(cs.best_index)])))
            cs.best_index = static_cast<int>(k);
    }
    return cs;
}

// Minimal-GIC mask; ties by smaller size, then lexicographic.
inline ModelMask best_model(const CandidateSet& candidates) {
    if (candidates.masks.empty())
        throw ConfigError("best_model: empty candidate set");
    size_t best = 0;
    for (size_t k = 1; k < candidates.masks.size(); ++k) {
        if (candidates.gics[k] < candidates.gics[best] ||
            (candidates.gics[k] == candidates.gics[best] &&
             size_lex_less(candidates.masks[k], candidates.masks[best])))
            best = k;
    }
    return candidates.masks[best];
}

inline double inference_sigma2_floor(const Dataset& data) {
    return 1e-12 * (data.Y.squaredNorm() / data.n() + 1.0);
}

// Gaussian log likelihood per observation at the least-squares fit with
// MLE variance (floored to stay finite on perfect fits).
inline Eigen::VectorXd pointwise_loglik(const Dataset& data,
                                        const ModelMask& u) {
    FitResult fit = fit_least_squares(data, u);
    double s2 = std::max(fit.sigma2_hat, inference_sigma2_floor(data));
    Eigen::VectorXd resid = data.Y - fit.fitted;
    Eigen::VectorXd ll(data.n());
    double c = -0.5 * std::log(2.0 * M_PI * s2);
    for (int i = 0; i < data.n(); ++i)
        ll[i] = c - resid[i] * resid[i] / (2.0 * s2);
    return ll;
}

// Square root of the variance (denominator n) of the per-observation
// log-likelihood-ratio contributions between u and u_sharp.
inline double omega_hat(const Dataset& data, const ModelMask& u,
                        const ModelMask& u_sharp) {
    Eigen::VectorXd diff =
        pointwise_loglik(data, u) - pointwise_loglik(data, u_sharp);
    double m = diff.mean();
    double v = (diff.array() - m).square().sum() / data.n();
    return std::sqrt(std::max(v, 0.0));
}

struct DistinguishabilityResult {
    double statistic = 0.0;  // n * omega_hat^2
    double p_value = 1.0;
    bool rejected = false;
};

namespace detail {

// Thin orthonormal basis of the mask's column space (empty for the null
// model). Projections through it give fitted values and residuals without
// refactorizing per response.
inline Eigen::MatrixXd thin_q(const Dataset& data, const ModelMask& u) {
    if (u.count() == 0) return Eigen::MatrixXd(data.n(), 0);
    Eigen::MatrixXd Xu = data.submatrix(u);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xu);
    if (qr.rank() < u.count())
        throw RankDeficient("thin_q: linearly dependent columns");
    return qr.householderQ() * Eigen::MatrixXd::Identity(data.n(), u.count());
}

// Centered variance statistic n * var_n(l_u - l_sharp) for a response y,
// given orthonormal bases for the two models. Only the variance matters,
// so the constant log-variance offsets cancel.
inline double llr_variance_statistic(const Eigen::VectorXd& y,
                                     const Eigen::MatrixXd& Qu,
                                     const Eigen::MatrixXd& Qs,
                                     double floor_val) {
    const int n = static_cast<int>(y.size());
    Eigen::VectorXd ru = y - Qu * (Qu.transpose() * y);
    Eigen::VectorXd rs = y - Qs * (Qs.transpose() * y);
    double s2u = std::max(ru.squaredNorm() / n, floor_val);
    double s2s = std::max(rs.squaredNorm() / n, floor_val);
    Eigen::VectorXd d =
        rs.array().square() / (2.0 * s2s) - ru.array().square() / (2.0 * s2u);
    double m = d.mean();
    double v = (d.array() - m).square().sum() / n;
    return n * v;
}

}  // namespace detail

// Tests H0: omega^2 = 0 (u and u_sharp indistinguishable) with statistic
// n * omega_hat^2. The null law is approximated by a residual bootstrap
// under the intersection model u AND u_sharp: responses are regenerated as
// intersection fit plus resampled centered intersection residuals, the
// statistic recomputed on each, and p = (1 + #{S* >= S}) / (B + 1).
inline DistinguishabilityResult distinguishability_test(
    const Dataset& data, const ModelMask& u, const ModelMask& u_sharp,
    double alpha, int resamples = 5000, uint64_t seed = 0x64697374ULL) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("distinguishability_test: alpha must lie in (0,1)");
    const int n = data.n();
    const double floor_val = inference_sigma2_floor(data);

    Eigen::MatrixXd Qu = detail::thin_q(data, u);
    Eigen::MatrixXd Qs = detail::thin_q(data, u_sharp);

    DistinguishabilityResult res;
    res.statistic =
        detail::llr_variance_statistic(data.Y, Qu, Qs, floor_val);

    ModelMask inter(u.dimension());
    for (int j = 0; j < u.dimension(); ++j)
        inter.set(j, u.test(j) && u_sharp.test(j));
    Eigen::MatrixXd Qi = detail::thin_q(data, inter);
    Eigen::VectorXd null_fit = Qi * (Qi.transpose() * data.Y);
    Eigen::VectorXd resid = data.Y - null_fit;
    resid.array() -= resid.mean();

    Rng rng = Rng::keyed(seed, 0xb007ULL);
    int at_least = 0;
    Eigen::VectorXd ystar(n);
    for (int b = 0; b < resamples; ++b) {
        for (int i = 0; i < n; ++i)
            ystar[i] =
                null_fit[i] +
                resid[static_cast<Eigen::Index>(rng.below(uint64_t(n)))];
        double s =
            detail::llr_variance_statistic(ystar, Qu, Qs, floor_val);
        if (s >= res.statistic) ++at_least;
    }
    res.p_value = (1.0 + at_least) / (double(resamples) + 1.0);
    res.rejected = res.p_value < alpha;
    return res;
}

// Reject when GIC(u) - GIC(u_sharp) > 2 z_{1-alpha} omega_hat sqrt(n).
inline bool superiority_test(const Dataset& data, const ModelMask& u,
                             const ModelMask& u_sharp, const GicConfig& cfg,
                             double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("superiority_test: alpha must lie in (0,1)");
    double diff = gic(data, u, cfg) - gic(data, u_sharp, cfg);
    double threshold = 2.0 * normal_quantile(1.0 - alpha) *
                       omega_hat(data, u, u_sharp) * std::sqrt(double(data.n()));
    return diff > threshold;
}

struct SmsRecord {
    double dis_p_value = 1.0;
    bool dis_rejected = false;
    bool sup_rejected = false;
    bool eliminated = false;
};

struct SmsResult {
    std::vector<int> survivors;      // candidate indices
    std::vector<SmsRecord> records;  // one per candidate
    double alpha = 0.05;
};

// Two-step elimination: a candidate leaves the survival set only when both
// the distinguishability and superiority tests reject. u# always survives.
inline SmsResult survival_model_set(const Dataset& data,
                                    const CandidateSet& candidates,
                                    const GicConfig& cfg, double alpha,
                                    int resamples = 5000,
                                    uint64_t seed = 0x5ede5ULL) {
    const int K = static_cast<int>(candidates.masks.size());
    if (K == 0) throw ConfigError("survival_model_set: empty candidates");
    SmsResult res;
    res.alpha = alpha;
    res.records.resize(static_cast<size_t>(K));
    const ModelMask& sharp =
        candidates.masks[static_cast<size_t>(candidates.best_index)];
    for (int k = 0; k < K; ++k) {
        SmsRecord& rec = res.records[static_cast<size_t>(k)];
        if (k == candidates.best_index ||
            candidates.masks[static_cast<size_t>(k)] == sharp) {
            rec.dis_p_value = 1.0;
        } else {
            DistinguishabilityResult dis = distinguishability_test(
                data, candidates.masks[static_cast<size_t>(k)], sharp, alpha,
                resamples, mix_keys(seed, uint64_t(k)));
            rec.dis_p_value = dis.p_value;
            rec.dis_rejected = dis.rejected;
            rec.sup_rejected = superiority_test(
                data, candidates.masks[static_cast<size_t>(k)], sharp, cfg,
                alpha);
        }
        rec.eliminated = rec.dis_rejected && rec.sup_rejected;
        if (!rec.eliminated) res.survivors.push_back(k);
    }
    return res;
}

enum class WeightKind { gic, al };

struct WeightVector {
    std::vector<double> w;
    WeightKind kind = WeightKind::gic;
};

// Softmax of -GIC/2 with max shift; a probability vector.
inline WeightVector gic_weights(const std::vector<double>& gics) {
    std::vector<double> half(gics.size());
    for (size_t k = 0; k < gics.size(); ++k) {
        if (!std::isfinite(gics[k]))
            throw NumericError("gic_weights: non-finite GIC");
        half[k] = -0.5 * gics[k];
    }
    return {softmax_shifted(half), WeightKind::gic};
}

// Box-constrained quadratic model-averaging weights: minimize
// Y'Y - 2 w'a + w'B w over [0,1]^K, where a_k = Y'(Htilde_k Y) and
// B_kl = (Htilde_k Y)'(Htilde_l Y) with Htilde_k Y the leave-one-out
// prediction vector of candidate k. B is a Gram matrix, so the problem is
// convex and needs no inversion; solved by projected coordinate descent.
// Candidates with a leverage of one are dropped (weight zero) with a note
// in `dropped`.
inline WeightVector al_weights(const Dataset& data,
                               const CandidateSet& candidates,
                               std::vector<int>* dropped = nullptr) {
    const int n = data.n();
    const int K = static_cast<int>(candidates.masks.size());
    if (K == 0) throw ConfigError("al_weights: empty candidates");

    std::vector<Eigen::VectorXd> loo;
    std::vector<int> kept;
    for (int k = 0; k < K; ++k) {
        FitResult fit = fit_least_squares(data, candidates.masks[size_t(k)]);
        bool ok = true;
        for (int i = 0; i < n; ++i)
            if (fit.hat_diagonals[i] >= 1.0 - 1e-10) {
                ok = false;
                break;
            }
        if (!ok) {
            if (dropped) dropped->push_back(k);
            continue;
        }
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i)
            v[i] = (fit.fitted[i] - fit.hat_diagonals[i] * data.Y[i]) /
                   (1.0 - fit.hat_diagonals[i]);
        loo.push_back(std::move(v));
        kept.push_back(k);
    }
    if (kept.empty())
        throw LeverageOne("al_weights: every candidate has leverage one");

    const int M = static_cast<int>(kept.size());
    Eigen::VectorXd a(M);
    Eigen::MatrixXd B(M, M);
    for (int k = 0; k < M; ++k) {
        a[k] = data.Y.dot(loo[size_t(k)]);
        for (int l = 0; l <= k; ++l) {
            double v = loo[size_t(k)].dot(loo[size_t(l)]);
            B(k, l) = v;
            B(l, k) = v;
        }
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(M);
    auto kkt_residual = [&]() {
        Eigen::VectorXd g = 2.0 * (B * w - a);
        double r = 0.0;
        for (int k = 0; k < M; ++k) {
            double rk;
            if (w[k] <= 0.0)
                rk = std::max(-g[k], 0.0);
            else if (w[k] >= 1.0)
                rk = std::max(g[k], 0.0);
            else
                rk = std::fabs(g[k]);
            r = std::max(r, rk);
        }
        return r;
    };

    const double tol = 1e-10;
    for (int sweep = 0; sweep < 200000; ++sweep) {
        double max_change = 0.0;
        for (int k = 0; k < M; ++k) {
            if (B(k, k) <= 0.0) {
                w[k] = 0.0;
                continue;
            }
            double without = a[k] - (B.row(k) * w - B(k, k) * w[k]);
            double next = std::clamp(without / B(k, k), 0.0, 1.0);
            max_change = std::max(max_change, std::fabs(next - w[k]));
            w[k] = next;
        }
        if (max_change < 1e-16 || kkt_residual() <= tol) break;
    }

    WeightVector out;
    out.kind = WeightKind::al;
    out.w.assign(static_cast<size_t>(K), 0.0);
    for (int k = 0; k < M; ++k)
        out.w[static_cast<size_t>(kept[size_t(k)])] = w[k];
    return out;
}

// The quadratic objective Y'Y - 2 w'a + w'B w evaluated from scratch;
// exposed for oracles and diagnostics.
inline double al_objective(const Dataset& data, const CandidateSet& candidates,
                           const std::vector<double>& w) {
    const int n = data.n();
    Eigen::VectorXd combo = Eigen::VectorXd::Zero(n);
    for (size_t k = 0; k < candidates.masks.size(); ++k) {
        FitResult fit = fit_least_squares(data, candidates.masks[k]);
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i)
            v[i] = (fit.fitted[i] - fit.hat_diagonals[i] * data.Y[i]) /
                   (1.0 - fit.hat_diagonals[i]);
        combo += w[k] * v;
    }
    return (data.Y - combo).squaredNorm();
}

// Ensemble prediction sum_k w_k H_k Y (in-sample fitted values).
inline Eigen::VectorXd model_average_predict(const Dataset& data,
                                             const CandidateSet& candidates,
                                             const WeightVector& weights) {
    if (weights.w.size() != candidates.masks.size())
        throw ConfigError("model_average_predict: weight length mismatch");
    Eigen::VectorXd yhat = Eigen::VectorXd::Zero(data.n());
    for (size_t k = 0; k < candidates.masks.size(); ++k) {
        if (weights.w[k] == 0.0) continue;
        yhat += weights.w[k] *
                fit_least_squares(data, candidates.masks[k]).fitted;
    }
    return yhat;
}

// Variable importance: weight mass of candidates containing each variable.
inline std::vector<double> soil(const CandidateSet& candidates,
                                const WeightVector& weights) {
    if (weights.kind != WeightKind::gic)
        throw ConfigError("soil: requires gic-kind (probability) weights");
    if (weights.w.size() != candidates.masks.size())
        throw ConfigError("soil: weight length mismatch");
    if (candidates.masks.empty()) throw ConfigError("soil: empty candidates");
    int d = candidates.masks[0].dimension();
    std::vector<double> s(static_cast<size_t>(d), 0.0);
    for (size_t k = 0; k < candidates.masks.size(); ++k)
        for (int j = 0; j < d; ++j)
            if (candidates.masks[k].test(j)) s[size_t(j)] += weights.w[k];
    return s;
}

// Positive selection rate and false discovery rate of a selection against
// the truth; empty selections score (0, 0).
inline std::pair<double, double> psr_fdr(const ModelMask& selected,
                                         const ModelMask& truth) {
    if (selected.dimension() != truth.dimension())
        throw ConfigError("psr_fdr: length mismatch");
    if (truth.count() == 0) throw ConfigError("psr_fdr: empty truth mask");
    int hit = 0, false_pos = 0;
    for (int j = 0; j < truth.dimension(); ++j) {
        if (selected.test(j) && truth.test(j)) ++hit;
        if (selected.test(j) && !truth.test(j)) ++false_pos;
    }
    double psr = double(hit) / double(truth.count());
    double fdr = double(false_pos) / double(std::max(selected.count(), 1));
    return {psr, fdr};
}

inline double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
    if (y.size() != yhat.size()) throw ConfigError("rmse: length mismatch");
    return std::sqrt((y - yhat).squaredNorm() / double(y.size()));
}

}  // namespace genreg
