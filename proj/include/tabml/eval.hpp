#pragma once

#include <tabml/types.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tabml {

// Stratified fold assignment: per class, rows are seeded-shuffled and dealt
// round-robin, with the dealing cursor carried across classes so both the
// per-class and the total fold sizes differ by at most one.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;  // per row, in [0, k)
};

FoldPlan stratifiedKFold(const Labels& y, std::size_t k, std::uint64_t seed);

// Confusion-matrix bundle. confusion(i, j) counts rows with actual class i
// and predicted class j. precisionDefined[j] is 0 when class j was never
// predicted (0/0 precision, reported as 0). macroPrecision averages over
// classes present in `actual`.
struct Metrics {
    Eigen::MatrixXi confusion;
    double accuracy = 0.0;
    std::vector<double> precision;
    std::vector<std::uint8_t> precisionDefined;
    double macroPrecision = 0.0;
};

Metrics computeMetrics(const Labels& predicted, const Labels& actual, int nClasses);

// Generic k-fold driver: calls evalFold(trainRows, testRows) per fold (row
// lists in ascending order) and collects the per-fold accuracies. Errors
// from a fold are rethrown with the fold index attached.
std::vector<double> crossValidate(
    const FoldPlan& plan,
    const std::function<double(const std::vector<std::size_t>&,
                               const std::vector<std::size_t>&)>& evalFold);

// Matrix-level convenience: per fold, fitPredict(trainX, trainY, testX)
// returns predicted labels for the held-out rows.
std::vector<double> crossValidate(
    const Matrix& X, const Labels& y, const FoldPlan& plan,
    const std::function<Labels(const Matrix&, const Labels&, const Matrix&)>& fitPredict,
    int nClasses);

double meanOf(const std::vector<double>& values);
double sampleStdOf(const std::vector<double>& values);

// Per-model evaluation results plus the figure payloads, assembled by the
// experiment runner and serialized to report JSON/CSV.
struct ModelResult {
    std::string name;
    Metrics holdout;
    std::vector<double> foldAccuracies;  // empty when cross-validation is off
    double cvMean = 0.0;
    double cvStd = 0.0;
};

struct EvaluationReport {
    std::vector<ModelResult> models;
    std::uint64_t seed = 0;
    std::string configDigest;
    std::vector<std::string> classLabels;
    std::vector<std::string> selectedFeatures;
    std::vector<std::string> warnings;
    Matrix pcaPoints;      // holdout test rows projected to 2-D (may be empty)
    Labels pcaPredicted;   // predicted class per projected row
    std::string pcaModel;  // name of the model whose predictions color the scatter
};

}  // namespace tabml
