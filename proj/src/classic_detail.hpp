#pragma once

#include <tabml/errors.hpp>
#include <tabml/types.hpp>

#include <cmath>
#include <set>

namespace tabml::detail {

// Index of the row's maximum, ties to the lower index.
inline int argmaxRow(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    int best = 0;
    for (int j = 1; j < row.size(); ++j) {
        if (row[j] > row[best]) best = j;
    }
    return best;
}

// Row-wise softmax with per-row max subtraction, in place.
inline void softmaxRowsInPlace(Matrix& Z) {
    for (Eigen::Index r = 0; r < Z.rows(); ++r) {
        const double zmax = Z.row(r).maxCoeff();
        Z.row(r) = (Z.row(r).array() - zmax).exp();
        Z.row(r) /= Z.row(r).sum();
    }
}

inline void requireMultipleClasses(const Labels& y, const char* who) {
    std::set<int> classes(y.begin(), y.end());
    if (classes.size() < 2) {
        throw DataError(std::string(who) + ": training labels hold a single class");
    }
}

inline void requireLabelsInRange(const Labels& y, int nClasses, const char* who) {
    for (int label : y) {
        if (label < 0 || label >= nClasses) {
            throw DataError(std::string(who) + ": label " + std::to_string(label) +
                            " outside [0, " + std::to_string(nClasses) + ")");
        }
    }
}

}  // namespace tabml::detail
