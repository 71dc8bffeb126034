#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "genreg/errors.hpp"

namespace genreg {

inline double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Sample variance with selectable denominator (n-1 by default).
inline double variance_of(const std::vector<double>& x, int ddof = 1) {
    double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - ddof);
}

// exp(x_i - max) / sum, the overflow-safe softmax. Shift invariance of the
// result under x -> x + c is exact up to rounding.
inline std::vector<double> softmax_shifted(const std::vector<double>& x) {
    if (x.empty()) throw ConfigError("softmax_shifted: empty input");
    double mx = *std::max_element(x.begin(), x.end());
    std::vector<double> w(x.size());
    double total = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        w[i] = std::exp(x[i] - mx);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

// Regularized incomplete beta I_x(a, b) by the Lentz continued fraction.
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ConfigError("incomplete_beta: parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    auto cont_frac = [](double aa, double bb, double xx) {
        const double eps = std::numeric_limits<double>::epsilon();
        const double tiny = 1e-300;
        double qab = aa + bb, qap = aa + 1.0, qam = aa - 1.0;
        double c = 1.0, d = 1.0 - qab * xx / qap;
        if (std::fabs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= 500; ++m) {
            int m2 = 2 * m;
            double num = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
            d = 1.0 + num * d;
            if (std::fabs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            num = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
            d = 1.0 + num * d;
            if (std::fabs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            double del = d * c;
            h *= del;
            if (std::fabs(del - 1.0) < 10.0 * eps) return h;
        }
        throw NoConvergence("incomplete_beta: continued fraction stalled");
    };

    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_front) * cont_frac(a, b, x) / a;
    return 1.0 - std::exp(ln_front) * cont_frac(b, a, 1.0 - x) / b;
}

inline double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw ConfigError("student_t_cdf: df must be positive");
    if (t == 0.0) return 0.5;
    double p = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return t > 0.0 ? 1.0 - p : p;
}

// Two-sided tail probability P(|T_df| >= |t|).
inline double student_t_two_sided_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Inverse standard normal CDF: Acklam's rational approximation polished by
// one Halley step against erfc, giving near machine precision.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ConfigError("normal_quantile: p must lie in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    } else if (p <= phigh) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
             a[5]) *
            q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r +
             1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
              c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

struct WelchResult {
    double statistic;
    double df;
    double p_value;
};

// Welch two-sample t-test with Satterthwaite degrees of freedom.
// Degenerate windows (both variances zero) resolve by mean comparison:
// identical means give p = 1, different means give p = 0.
inline WelchResult welch_t_test(const std::vector<double>& x,
                                const std::vector<double>& y) {
    if (x.size() < 2 || y.size() < 2)
        throw ConfigError("welch_t_test: need at least two values per sample");
    double n1 = static_cast<double>(x.size());
    double n2 = static_cast<double>(y.size());
    double m1 = mean_of(x), m2 = mean_of(y);
    double v1 = variance_of(x), v2 = variance_of(y);
    double se2 = v1 / n1 + v2 / n2;
    if (se2 <= 0.0) {
        bool same = m1 == m2;
        return {same ? 0.0 : std::numeric_limits<double>::infinity(),
                n1 + n2 - 2.0, same ? 1.0 : 0.0};
    }
    double t = (m1 - m2) / std::sqrt(se2);
    double df = se2 * se2 /
                (v1 * v1 / (n1 * n1 * (n1 - 1.0)) +
                 v2 * v2 / (n2 * n2 * (n2 - 1.0)));
    return {t, df, student_t_two_sided_p(t, df)};
}

}  // namespace genreg
