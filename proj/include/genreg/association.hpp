#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"

namespace genreg {

enum class AssociationKind { marginal_correlation, holp };

// |Cor(X_j, Y)| per variable; a constant column (or constant response)
// contributes zero.
inline std::vector<double> marginal_correlations(const Dataset& data) {
    const int n = data.n(), d = data.d();
    Eigen::VectorXd yc = data.Y.array() - data.Y.mean();
    double sy = yc.squaredNorm();
    std::vector<double> gamma(static_cast<size_t>(d), 0.0);
    if (sy <= 0.0) return gamma;
    for (int j = 0; j < d; ++j) {
        Eigen::VectorXd xc = data.X.col(j).array() - data.X.col(j).mean();
        double sx = xc.squaredNorm();
        if (sx <= 0.0) continue;
        gamma[static_cast<size_t>(j)] =
            std::fabs(xc.dot(yc) / std::sqrt(sx * sy));
        (void)n;
    }
    return gamma;
}

// High-dimensional ordinary least squares projection |X'(XX')^{-1} Y|.
// Only defined for d >= n; a singular Gram picks up the scaled ridge
// delta = 1e-8 tr(XX')/n.
inline std::vector<double> holp_scores(const Dataset& data) {
    const int n = data.n(), d = data.d();
    if (d < n)
        throw HolpRequiresWide("holp_scores: requires d >= n, got d = " +
                               std::to_string(d) + ", n = " +
                               std::to_string(n));
    Eigen::MatrixXd A = data.X * data.X.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        double delta = 1e-8 * A.trace() / n;
        A.diagonal().array() += delta;
        llt.compute(A);
        if (llt.info() != Eigen::Success)
            throw NumericError("holp_scores: Gram factorization failed");
    }
    Eigen::VectorXd z = llt.solve(data.Y);
    Eigen::VectorXd g = (data.X.transpose() * z).cwiseAbs();
    return std::vector<double>(g.data(), g.data() + g.size());
}

// Screening signal gamma_j >= 0 used by adaptive mutation and by the
// random initializer's variable weighting.
inline std::vector<double> association_measures(const Dataset& data,
                                                AssociationKind kind) {
    switch (kind) {
        case AssociationKind::marginal_correlation:
            return marginal_correlations(data);
        case AssociationKind::holp:
            return holp_scores(data);
    }
    throw ConfigError("association_measures: unknown kind");
}

}  // namespace genreg
