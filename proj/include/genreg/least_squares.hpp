#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"
#include "genreg/model_mask.hpp"

namespace genreg {

struct FitResult {
    Eigen::VectorXd coefficients;   // length |u|, in variable order
    Eigen::VectorXd fitted;         // length n
    Eigen::VectorXd hat_diagonals;  // length n
    double rss = 0.0;
    double sigma2_hat = 0.0;        // rss / n, no floor applied
    int rank = 0;
};

// Least squares on the active columns via column-pivoted Householder QR.
// Throws SizeTooLarge when |u| >= n and RankDeficient when the selected
// columns are linearly dependent.
inline FitResult fit_least_squares(const Dataset& data, const ModelMask& u) {
    const int n = data.n();
    const int m = u.count();
    if (u.dimension() != data.d())
        throw ConfigError("fit_least_squares: mask dimension mismatch");
    if (m >= n)
        throw SizeTooLarge("fit_least_squares: model size " +
                           std::to_string(m) + " not below n = " +
                           std::to_string(n));

    FitResult r;
    if (m == 0) {
        r.coefficients = Eigen::VectorXd(0);
        r.fitted = Eigen::VectorXd::Zero(n);
        r.hat_diagonals = Eigen::VectorXd::Zero(n);
        r.rss = data.Y.squaredNorm();
        r.sigma2_hat = r.rss / n;
        r.rank = 0;
        return r;
    }

    Eigen::MatrixXd Xu = data.submatrix(u);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xu);
    r.rank = static_cast<int>(qr.rank());
    if (r.rank < m)
        throw RankDeficient("fit_least_squares: rank " +
                            std::to_string(r.rank) + " < " +
                            std::to_string(m) + " active columns");

    r.coefficients = qr.solve(data.Y);
    r.fitted = Xu * r.coefficients;
    r.rss = (data.Y - r.fitted).squaredNorm();
    r.sigma2_hat = r.rss / n;

    Eigen::MatrixXd thinQ =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    r.hat_diagonals = thinQ.rowwise().squaredNorm();

    if (!r.coefficients.allFinite() || !std::isfinite(r.rss))
        throw NumericError("fit_least_squares: non-finite solution");
    return r;
}

// Residual sum of squares only; the hot path for model scoring (skips
// forming Q and the hat diagonal).
inline double rss_of_fit(const Dataset& data, const ModelMask& u) {
    const int n = data.n();
    const int m = u.count();
    if (m >= n)
        throw SizeTooLarge("rss_of_fit: model size not below n");
    if (m == 0) return data.Y.squaredNorm();
    Eigen::MatrixXd Xu = data.submatrix(u);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xu);
    if (qr.rank() < m)
        throw RankDeficient("rss_of_fit: linearly dependent columns");
    double rss = (data.Y - Xu * qr.solve(data.Y)).squaredNorm();
    if (!std::isfinite(rss)) throw NumericError("rss_of_fit: non-finite rss");
    return rss;
}

}  // namespace genreg
