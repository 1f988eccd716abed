#include <tabml/eval.hpp>

#include <tabml/errors.hpp>
#include <tabml/rng.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace tabml {
namespace {

// Rethrow a fold's error with the fold index attached, preserving the type.
[[noreturn]] void rethrowWithFold(std::size_t fold) {
    const std::string prefix = "fold " + std::to_string(fold) + ": ";
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const DataError& e) {
        throw DataError(prefix + e.what());
    } catch (const NumericError& e) {
        throw NumericError(prefix + e.what());
    }
}

}  // namespace

FoldPlan stratifiedKFold(const Labels& y, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("stratifiedKFold: k must be at least 2");
    if (k > y.size()) throw ConfigError("stratifiedKFold: k exceeds the row count");

    std::map<int, std::vector<std::size_t>> byClass;
    for (std::size_t r = 0; r < y.size(); ++r) byClass[y[r]].push_back(r);

    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(y.size(), 0);

    // One shared stream and a dealing cursor that carries across classes, so
    // the total fold sizes stay within one of each other too.
    Xorshift64Star rng(seed);
    std::size_t cursor = 0;
    for (auto& [label, rows] : byClass) {
        shuffle(rows, rng);
        for (std::size_t r : rows) {
            plan.assignments[r] = cursor;
            cursor = (cursor + 1) % k;
        }
    }
    return plan;
}

Metrics computeMetrics(const Labels& predicted, const Labels& actual, int nClasses) {
    if (predicted.size() != actual.size()) {
        throw DataError("computeMetrics: prediction/actual length mismatch");
    }
    if (predicted.empty()) throw DataError("computeMetrics: no samples");

    Metrics metrics;
    metrics.confusion = Eigen::MatrixXi::Zero(nClasses, nClasses);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int a = actual[i];
        const int p = predicted[i];
        if (a < 0 || a >= nClasses || p < 0 || p >= nClasses) {
            throw DataError("computeMetrics: label outside the class roster");
        }
        ++metrics.confusion(a, p);
    }

    const auto total = static_cast<double>(predicted.size());
    metrics.accuracy = static_cast<double>(metrics.confusion.trace()) / total;

    metrics.precision.resize(static_cast<std::size_t>(nClasses));
    metrics.precisionDefined.resize(static_cast<std::size_t>(nClasses));
    for (int c = 0; c < nClasses; ++c) {
        const int columnSum = metrics.confusion.col(c).sum();
        const auto ci = static_cast<std::size_t>(c);
        if (columnSum == 0) {
            metrics.precision[ci] = 0.0;  // 0/0, flagged
            metrics.precisionDefined[ci] = 0;
        } else {
            metrics.precision[ci] =
                static_cast<double>(metrics.confusion(c, c)) / columnSum;
            metrics.precisionDefined[ci] = 1;
        }
    }

    double precisionSum = 0.0;
    int present = 0;
    for (int c = 0; c < nClasses; ++c) {
        if (metrics.confusion.row(c).sum() > 0) {
            precisionSum += metrics.precision[static_cast<std::size_t>(c)];
            ++present;
        }
    }
    metrics.macroPrecision = present > 0 ? precisionSum / present : 0.0;
    return metrics;
}

std::vector<double> crossValidate(
    const FoldPlan& plan,
    const std::function<double(const std::vector<std::size_t>&,
                               const std::vector<std::size_t>&)>& evalFold) {
    std::vector<double> accuracies;
    accuracies.reserve(plan.k);
    for (std::size_t fold = 0; fold < plan.k; ++fold) {
        std::vector<std::size_t> trainRows;
        std::vector<std::size_t> testRows;
        for (std::size_t r = 0; r < plan.assignments.size(); ++r) {
            (plan.assignments[r] == fold ? testRows : trainRows).push_back(r);
        }
        try {
            accuracies.push_back(evalFold(trainRows, testRows));
        } catch (const Error&) {
            rethrowWithFold(fold);
        }
    }
    return accuracies;
}

std::vector<double> crossValidate(
    const Matrix& X, const Labels& y, const FoldPlan& plan,
    const std::function<Labels(const Matrix&, const Labels&, const Matrix&)>& fitPredict,
    int nClasses) {
    if (static_cast<std::size_t>(X.rows()) != plan.assignments.size() ||
        y.size() != plan.assignments.size()) {
        throw DataError("crossValidate: plan does not match the data length");
    }
    return crossValidate(plan, [&](const std::vector<std::size_t>& trainRows,
                                   const std::vector<std::size_t>& testRows) {
        Matrix trainX(static_cast<Eigen::Index>(trainRows.size()), X.cols());
        Labels trainY(trainRows.size());
        for (std::size_t i = 0; i < trainRows.size(); ++i) {
            trainX.row(static_cast<Eigen::Index>(i)) =
                X.row(static_cast<Eigen::Index>(trainRows[i]));
            trainY[i] = y[trainRows[i]];
        }
        Matrix testX(static_cast<Eigen::Index>(testRows.size()), X.cols());
        Labels testY(testRows.size());
        for (std::size_t i = 0; i < testRows.size(); ++i) {
            testX.row(static_cast<Eigen::Index>(i)) =
                X.row(static_cast<Eigen::Index>(testRows[i]));
            testY[i] = y[testRows[i]];
        }
        const Labels predicted = fitPredict(trainX, trainY, testX);
        return computeMetrics(predicted, testY, nClasses).accuracy;
    });
}

double meanOf(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sampleStdOf(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const double mean = meanOf(values);
    double sum = 0.0;
    for (double v : values) sum += (v - mean) * (v - mean);
    return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

}  // namespace tabml
