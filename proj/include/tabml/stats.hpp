#pragma once

#include <tabml/errors.hpp>
#include <tabml/types.hpp>

#include <cmath>
#include <vector>

namespace tabml {

// Regularized incomplete beta I_x(a, b), continued-fraction expansion
// (modified Lentz), converged to 1e-13. Requires a, b > 0 and x in [0, 1].
double regularizedIncompleteBeta(double a, double b, double x);

// Regularized incomplete gamma pair: lower P(a, x) and upper Q(a, x) = 1 - P.
// Series expansion for x < a + 1, continued fraction otherwise.
double regularizedLowerGamma(double a, double x);
double regularizedUpperGamma(double a, double x);

// Survival function P(F >= f) of the F(d1, d2) distribution.
double fSurvival(double f, double d1, double d2);

// Survival function P(X >= x) of the chi-square distribution with dof degrees.
double chiSquareSurvival(double x, double dof);

// Pearson correlation with population standard deviations:
//   r = sum((a_i - mean_a)(b_i - mean_b)) / (n * sigma_a * sigma_b),
// clamped to [-1, 1]. Throws DataError on length mismatch, n < 2, or a
// constant sequence.
template <typename DerivedA, typename DerivedB>
double pearsonCorrelation(const Eigen::MatrixBase<DerivedA>& a,
                          const Eigen::MatrixBase<DerivedB>& b) {
    const Eigen::Index n = a.size();
    if (n != b.size()) throw DataError("pearsonCorrelation: length mismatch");
    if (n < 2) throw DataError("pearsonCorrelation: need at least 2 values");

    const Vector av = a.derived().template cast<double>().reshaped();
    const Vector bv = b.derived().template cast<double>().reshaped();
    bool constantA = true;
    bool constantB = true;
    for (Eigen::Index i = 1; i < n; ++i) {
        if (av[i] != av[0]) constantA = false;
        if (bv[i] != bv[0]) constantB = false;
    }
    if (constantA || constantB) {
        throw DataError("pearsonCorrelation: zero variance in input sequence");
    }

    const double meanA = av.mean();
    const double meanB = bv.mean();
    const Vector ca = av.array() - meanA;
    const Vector cb = bv.array() - meanB;
    const double nd = static_cast<double>(n);
    const double sigmaA = std::sqrt(ca.squaredNorm() / nd);
    const double sigmaB = std::sqrt(cb.squaredNorm() / nd);
    const double r = ca.dot(cb) / (nd * sigmaA * sigmaB);
    return std::clamp(r, -1.0, 1.0);
}

// One-way ANOVA F-test p-value of class-mean equality for a single feature.
// A bitwise-constant feature gives p = 1. Throws DataError when fewer than
// two classes are present or the residual degrees of freedom vanish.
double anovaPValue(const Eigen::Ref<const Vector>& values, const Labels& y);

// Per-column ANOVA p-values for every feature in X.
Vector featurePValues(const Matrix& X, const Labels& y);

// Chi-square test of independence between a categorical feature (as codes)
// and class labels. Degenerate tables (a single occupied row or column)
// give p = 1.
double chiSquarePValue(const std::vector<int>& categories, const Labels& y);

}  // namespace tabml
