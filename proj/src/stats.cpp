#include <tabml/stats.hpp>

#include <algorithm>
#include <limits>
#include <map>

namespace tabml {
namespace {

constexpr double kTol = 1e-13;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 500;

// Continued fraction for the incomplete beta (modified Lentz).
double betaContinuedFraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kTol) return h;
    }
    throw NumericError("regularizedIncompleteBeta: continued fraction did not converge");
}

// Lower incomplete gamma by series expansion, valid for x < a + 1.
double lowerGammaSeries(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kTol) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NumericError("regularizedLowerGamma: series did not converge");
}

// Upper incomplete gamma by continued fraction, valid for x >= a + 1.
double upperGammaContinuedFraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kTol) {
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NumericError("regularizedUpperGamma: continued fraction did not converge");
}

}  // namespace

double regularizedIncompleteBeta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ConfigError("regularizedIncompleteBeta: parameters must be positive");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ConfigError("regularizedIncompleteBeta: x outside [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double logBt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(logBt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betaContinuedFraction(a, b, x) / a;
    }
    return 1.0 - bt * betaContinuedFraction(b, a, 1.0 - x) / b;
}

double regularizedLowerGamma(double a, double x) {
    if (!(a > 0.0)) throw ConfigError("regularizedLowerGamma: a must be positive");
    if (!(x >= 0.0)) throw ConfigError("regularizedLowerGamma: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return lowerGammaSeries(a, x);
    return 1.0 - upperGammaContinuedFraction(a, x);
}

double regularizedUpperGamma(double a, double x) {
    if (!(a > 0.0)) throw ConfigError("regularizedUpperGamma: a must be positive");
    if (!(x >= 0.0)) throw ConfigError("regularizedUpperGamma: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - lowerGammaSeries(a, x);
    return upperGammaContinuedFraction(a, x);
}

double fSurvival(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) {
        throw ConfigError("fSurvival: degrees of freedom must be positive");
    }
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return regularizedIncompleteBeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double chiSquareSurvival(double x, double dof) {
    if (!(dof > 0.0)) throw ConfigError("chiSquareSurvival: dof must be positive");
    if (x <= 0.0) return 1.0;
    return regularizedUpperGamma(dof / 2.0, x / 2.0);
}

double anovaPValue(const Eigen::Ref<const Vector>& values, const Labels& y) {
    const Eigen::Index n = values.size();
    if (static_cast<std::size_t>(n) != y.size()) {
        throw DataError("anovaPValue: feature/label length mismatch");
    }
    if (n < 2) throw DataError("anovaPValue: need at least 2 samples");

    bool constant = true;
    for (Eigen::Index i = 1; i < n; ++i) {
        if (values[i] != values[0]) {
            constant = false;
            break;
        }
    }
    if (constant) return 1.0;

    std::map<int, std::pair<double, std::size_t>> groups;  // label -> (sum, count)
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& g = groups[y[static_cast<std::size_t>(i)]];
        g.first += values[i];
        g.second += 1;
    }
    const std::size_t k = groups.size();
    if (k < 2) throw DataError("anovaPValue: degenerate labels, need at least 2 classes");
    if (static_cast<std::size_t>(n) <= k) {
        throw DataError("anovaPValue: no residual degrees of freedom");
    }

    const double grandMean = values.mean();
    std::map<int, double> groupMean;
    double ssb = 0.0;
    for (const auto& [label, g] : groups) {
        const double mean = g.first / static_cast<double>(g.second);
        groupMean[label] = mean;
        const double d = mean - grandMean;
        ssb += static_cast<double>(g.second) * d * d;
    }
    double ssw = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = values[i] - groupMean[y[static_cast<std::size_t>(i)]];
        ssw += d * d;
    }

    const double d1 = static_cast<double>(k - 1);
    const double d2 = static_cast<double>(static_cast<std::size_t>(n) - k);
    if (ssw <= 0.0) return ssb > 0.0 ? 0.0 : 1.0;
    const double f = (ssb / d1) / (ssw / d2);
    return fSurvival(std::max(f, 0.0), d1, d2);
}

Vector featurePValues(const Matrix& X, const Labels& y) {
    Vector p(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        p[j] = anovaPValue(X.col(j), y);
    }
    return p;
}

double chiSquarePValue(const std::vector<int>& categories, const Labels& y) {
    if (categories.size() != y.size()) {
        throw DataError("chiSquarePValue: feature/label length mismatch");
    }
    if (categories.empty()) throw DataError("chiSquarePValue: empty input");

    std::map<int, std::size_t> rowIndex;
    std::map<int, std::size_t> colIndex;
    for (int c : categories) rowIndex.emplace(c, rowIndex.size());
    for (int label : y) colIndex.emplace(label, colIndex.size());
    const std::size_t nRows = rowIndex.size();
    const std::size_t nCols = colIndex.size();
    if (nRows < 2 || nCols < 2) return 1.0;

    Matrix observed = Matrix::Zero(static_cast<Eigen::Index>(nRows),
                                   static_cast<Eigen::Index>(nCols));
    for (std::size_t i = 0; i < categories.size(); ++i) {
        observed(static_cast<Eigen::Index>(rowIndex[categories[i]]),
                 static_cast<Eigen::Index>(colIndex[y[i]])) += 1.0;
    }
    const double total = static_cast<double>(categories.size());
    const Vector rowSums = observed.rowwise().sum();
    const Vector colSums = observed.colwise().sum().transpose();

    double chi2 = 0.0;
    for (Eigen::Index r = 0; r < observed.rows(); ++r) {
        for (Eigen::Index c = 0; c < observed.cols(); ++c) {
            const double expected = rowSums[r] * colSums[c] / total;
            if (expected <= 0.0) continue;
            const double d = observed(r, c) - expected;
            chi2 += d * d / expected;
        }
    }
    const double dof = static_cast<double>((nRows - 1) * (nCols - 1));
    return chiSquareSurvival(chi2, dof);
}

}  // namespace tabml
