#pragma once

#include <tabml/eval.hpp>

#include <string>

namespace tabml {

// Bar chart of per-model holdout accuracy, sorted descending (ties by name).
// Deterministic byte-for-byte given the report.
std::string accuracyBarChart(const EvaluationReport& report);

// 2-D scatter of PCA-projected rows colored by predicted class, with a
// legend. Deterministic byte-for-byte given the inputs.
std::string pcaScatterPlot(const Matrix& points, const Labels& predicted,
                           const std::vector<std::string>& classNames);

}  // namespace tabml
