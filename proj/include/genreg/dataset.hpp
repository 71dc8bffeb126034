#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "genreg/errors.hpp"
#include "genreg/model_mask.hpp"

namespace genreg {

// Design matrix X (n x d) and response Y (n). No intercept column is
// implied; callers wanting one must include it as a variable.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd Y;
    std::vector<std::string> column_names;

    int n() const { return static_cast<int>(X.rows()); }
    int d() const { return static_cast<int>(X.cols()); }

    void validate() const {
        if (X.rows() != Y.size())
            throw ConfigError("Dataset: X and Y row counts differ");
        if (X.rows() < 2) throw ConfigError("Dataset: need at least 2 rows");
        if (X.cols() < 1)
            throw ConfigError("Dataset: need at least 1 predictor");
        if (!X.allFinite() || !Y.allFinite())
            throw NumericError("Dataset: non-finite entries");
        if (!column_names.empty() &&
            column_names.size() != static_cast<size_t>(X.cols()))
            throw ConfigError("Dataset: column name count mismatch");
    }

    // Columns of X selected by the mask, in variable order.
    Eigen::MatrixXd submatrix(const ModelMask& u) const {
        std::vector<int> idx = u.active();
        Eigen::MatrixXd sub(X.rows(), static_cast<Eigen::Index>(idx.size()));
        for (size_t c = 0; c < idx.size(); ++c)
            sub.col(static_cast<Eigen::Index>(c)) = X.col(idx[c]);
        return sub;
    }
};

}  // namespace genreg
