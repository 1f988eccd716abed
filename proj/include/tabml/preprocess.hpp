#pragma once

#include <tabml/stats.hpp>
#include <tabml/table.hpp>
#include <tabml/types.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tabml {

// --- Feature selection ------------------------------------------------------

enum class DropReason { HighP, Collinear };

struct DroppedFeature {
    std::string name;
    DropReason reason = DropReason::HighP;
};

// Outcome of the p-value + multicollinearity filter. `correlation` covers
// all d input features; entries involving a constant feature are 0 and the
// diagonal is 1 only for non-constant features. `selected` keeps the input
// feature order.
struct FeatureReport {
    std::vector<std::string> names;
    Vector pValues;
    Matrix correlation;
    std::vector<DroppedFeature> dropped;
    std::vector<std::string> selected;
};

// Drops features whose ANOVA p-value is >= pThreshold (reason HighP), then
// repeatedly drops, from the surviving pair with |r| > corrThreshold, the
// member with the larger mean absolute correlation to all other survivors
// (reason Collinear; ties keep the earlier column). Thresholds must lie in
// (0, 1]. Throws DataError when nothing survives.
FeatureReport selectFeatures(const Matrix& X, const Labels& y,
                             const std::vector<std::string>& names, double pThreshold,
                             double corrThreshold);

// --- Min-max scaling --------------------------------------------------------

// Per-feature (min, max) fitted on training data.
struct MinMaxScaler {
    Vector min;
    Vector max;
};

MinMaxScaler minMaxFit(const Matrix& X);

// x' = (x - min) / (max - min) per feature. Constant features (max == min)
// map to 0.0. Values outside the fitted range are not clamped.
Matrix minMaxTransform(const Matrix& X, const MinMaxScaler& scaler);

// --- PCA --------------------------------------------------------------------

// Eigendecomposition of a symmetric matrix: eigenvalues in descending order,
// eigenvectors as matching columns of `vectors`. Each eigenvector's
// largest-magnitude entry is made positive (first such entry on ties).
struct EigenDecomposition {
    Vector values;
    Matrix vectors;
};

// Cyclic Jacobi rotation sweeps until the off-diagonal Frobenius norm falls
// below 1e-12 relative to the matrix norm. Throws NumericError when the
// sweep limit is hit.
EigenDecomposition jacobiEigenSymmetric(const Matrix& A);

struct PcaState {
    Vector mean;
    Matrix components;  // k x d, rows orthonormal
    Vector eigenvalues;  // all d sample-covariance eigenvalues, descending
};

// Top-k principal components of the sample covariance (1/(n-1)). Requires
// k <= d (ConfigError) and n >= 2 (DataError).
PcaState pcaFit(const Matrix& X, std::size_t k);

// (X - mean) * components^T, an n x k matrix.
Matrix pcaTransform(const Matrix& X, const PcaState& state);

// --- Fitted pipeline state --------------------------------------------------

struct PreprocessOptions {
    ImputeStrategy imputation = ImputeStrategy::Mean;
    EncodingMode encoding = EncodingMode::Integer;
    double pThreshold = 0.05;
    double corrThreshold = 0.9;
    bool scaling = true;
    std::size_t pcaComponents = 2;  // 0 disables the visualization projection
};

// Every data-dependent transform parameter, fitted on training rows only and
// replayed verbatim on any later table.
struct PreprocessState {
    std::vector<std::pair<std::string, double>> imputeValues;  // numeric features
    std::vector<EncoderMap> encoders;                          // categorical features
    std::vector<std::string> selectedFeatures;                 // post-encoding names
    bool scaling = true;
    MinMaxScaler scaler;  // aligned with selectedFeatures when scaling
    std::optional<PcaState> pca;
};

// Fits imputation values, feature encoders, the target encoder, feature
// selection, the scaler, and (optionally) the visualization PCA on `train`.
// Returns the state, the selection report, and the ordered class labels.
struct FitResult {
    PreprocessState state;
    FeatureReport report;
    std::vector<std::string> classLabels;
};

FitResult fitPreprocess(const Table& train, const PreprocessOptions& options);

// Replays imputation, encoding, selection, and scaling on any table holding
// the fitted feature columns. Throws DataError listing every missing column.
Matrix applyPreprocess(const Table& table, const PreprocessState& state);

// Encodes the target column of `table` against the fitted class roster.
Labels encodeTarget(const Table& table, const std::vector<std::string>& classLabels);

// Matrix of the named numeric columns, in the given order. Cells must be
// present; columns must exist and be numeric.
Matrix tableToMatrix(const Table& table, const std::vector<std::string>& names);

}  // namespace tabml
