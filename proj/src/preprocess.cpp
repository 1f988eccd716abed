#include <tabml/preprocess.hpp>

#include <tabml/errors.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace tabml {
namespace {

constexpr double kJacobiTolerance = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

bool isConstantColumn(const Matrix& X, Eigen::Index col) {
    for (Eigen::Index r = 1; r < X.rows(); ++r) {
        if (X(r, col) != X(0, col)) return false;
    }
    return true;
}

double offDiagonalNorm(const Matrix& M) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (i != j) sum += M(i, j) * M(i, j);
        }
    }
    return std::sqrt(sum);
}

}  // namespace

FeatureReport selectFeatures(const Matrix& X, const Labels& y,
                             const std::vector<std::string>& names, double pThreshold,
                             double corrThreshold) {
    if (!(pThreshold > 0.0 && pThreshold <= 1.0) ||
        !(corrThreshold > 0.0 && corrThreshold <= 1.0)) {
        throw ConfigError("selectFeatures: thresholds must lie in (0, 1]");
    }
    const auto d = static_cast<std::size_t>(X.cols());
    if (names.size() != d) throw DataError("selectFeatures: name/column count mismatch");

    FeatureReport report;
    report.names = names;
    report.pValues = featurePValues(X, y);

    std::vector<bool> constant(d);
    for (std::size_t i = 0; i < d; ++i) {
        constant[i] = isConstantColumn(X, static_cast<Eigen::Index>(i));
    }
    report.correlation = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        if (!constant[i]) report.correlation(i, i) = 1.0;
        for (std::size_t j = i + 1; j < d; ++j) {
            if (constant[i] || constant[j]) continue;
            const double r = pearsonCorrelation(X.col(static_cast<Eigen::Index>(i)),
                                                X.col(static_cast<Eigen::Index>(j)));
            report.correlation(i, j) = r;
            report.correlation(j, i) = r;
        }
    }

    std::vector<bool> alive(d, true);
    for (std::size_t i = 0; i < d; ++i) {
        if (report.pValues[static_cast<Eigen::Index>(i)] >= pThreshold) {
            alive[i] = false;
            report.dropped.push_back({names[i], DropReason::HighP});
        }
    }

    // Iteratively resolve collinear pairs: the survivor with the largest
    // mean |r| to the other survivors goes first; ties keep the earlier
    // column.
    while (true) {
        std::vector<std::size_t> survivors;
        for (std::size_t i = 0; i < d; ++i) {
            if (alive[i]) survivors.push_back(i);
        }
        std::set<std::size_t> involved;
        for (std::size_t a = 0; a < survivors.size(); ++a) {
            for (std::size_t b = a + 1; b < survivors.size(); ++b) {
                if (std::abs(report.correlation(static_cast<Eigen::Index>(survivors[a]),
                                                static_cast<Eigen::Index>(survivors[b]))) >
                    corrThreshold) {
                    involved.insert(survivors[a]);
                    involved.insert(survivors[b]);
                }
            }
        }
        if (involved.empty()) break;

        std::size_t worst = d;
        double worstMean = -1.0;
        for (std::size_t f : involved) {
            double sum = 0.0;
            for (std::size_t other : survivors) {
                if (other != f) {
                    sum += std::abs(report.correlation(static_cast<Eigen::Index>(f),
                                                       static_cast<Eigen::Index>(other)));
                }
            }
            const double meanAbs =
                survivors.size() > 1 ? sum / static_cast<double>(survivors.size() - 1) : 0.0;
            // On ties the later column goes, keeping the earlier one.
            if (meanAbs > worstMean || (meanAbs == worstMean && f > worst)) {
                worstMean = meanAbs;
                worst = f;
            }
        }
        alive[worst] = false;
        report.dropped.push_back({names[worst], DropReason::Collinear});
    }

    for (std::size_t i = 0; i < d; ++i) {
        if (alive[i]) report.selected.push_back(names[i]);
    }
    if (report.selected.empty()) throw DataError("selectFeatures: every feature was dropped");
    return report;
}

MinMaxScaler minMaxFit(const Matrix& X) {
    if (X.rows() < 1) throw DataError("minMaxFit: need at least one row");
    MinMaxScaler scaler;
    scaler.min = X.colwise().minCoeff();
    scaler.max = X.colwise().maxCoeff();
    return scaler;
}

Matrix minMaxTransform(const Matrix& X, const MinMaxScaler& scaler) {
    if (X.cols() != scaler.min.size() || X.cols() != scaler.max.size()) {
        throw DataError("minMaxTransform: feature count does not match the fitted scaler");
    }
    Matrix out(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double lo = scaler.min[c];
        const double range = scaler.max[c] - lo;
        if (range == 0.0) {
            out.col(c).setZero();
        } else {
            out.col(c) = (X.col(c).array() - lo) / range;
        }
    }
    return out;
}

EigenDecomposition jacobiEigenSymmetric(const Matrix& A) {
    if (A.rows() != A.cols()) throw DataError("jacobiEigenSymmetric: matrix must be square");
    const Eigen::Index d = A.rows();
    Matrix M = A;
    Matrix V = Matrix::Identity(d, d);
    const double norm = M.norm();
    const double target = kJacobiTolerance * std::max(norm, 1e-300);

    int sweep = 0;
    while (offDiagonalNorm(M) > target) {
        if (++sweep > kJacobiMaxSweeps) {
            throw NumericError("jacobiEigenSymmetric: no convergence after 100 sweeps");
        }
        for (Eigen::Index p = 0; p < d - 1; ++p) {
            for (Eigen::Index q = p + 1; q < d; ++q) {
                const double apq = M(p, q);
                if (apq == 0.0) continue;
                const double theta = (M(q, q) - M(p, p)) / (2.0 * apq);
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = M(p, p);
                const double aqq = M(q, q);
                M(p, p) = app - t * apq;
                M(q, q) = aqq + t * apq;
                M(p, q) = 0.0;
                M(q, p) = 0.0;
                for (Eigen::Index i = 0; i < d; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = M(i, p);
                    const double aiq = M(i, q);
                    M(i, p) = c * aip - s * aiq;
                    M(p, i) = M(i, p);
                    M(i, q) = s * aip + c * aiq;
                    M(q, i) = M(i, q);
                }
                for (Eigen::Index i = 0; i < d; ++i) {
                    const double vip = V(i, p);
                    const double viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&M](Eigen::Index a, Eigen::Index b) { return M(a, a) > M(b, b); });

    EigenDecomposition result;
    result.values.resize(d);
    result.vectors.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        result.values[i] = M(src, src);
        result.vectors.col(i) = V.col(src);
        // Canonical sign: the first largest-magnitude entry is positive.
        Eigen::Index top = 0;
        for (Eigen::Index r = 1; r < d; ++r) {
            if (std::abs(result.vectors(r, i)) > std::abs(result.vectors(top, i))) top = r;
        }
        if (result.vectors(top, i) < 0.0) result.vectors.col(i) = -result.vectors.col(i);
    }
    return result;
}

PcaState pcaFit(const Matrix& X, std::size_t k) {
    const auto d = static_cast<std::size_t>(X.cols());
    if (k < 1 || k > d) throw ConfigError("pcaFit: component count must lie in [1, feature count]");
    if (X.rows() < 2) throw DataError("pcaFit: need at least two rows");

    PcaState state;
    state.mean = X.colwise().mean();
    const Matrix centered = X.rowwise() - state.mean.transpose();
    const Matrix covariance =
        centered.transpose() * centered / static_cast<double>(X.rows() - 1);
    const EigenDecomposition eig = jacobiEigenSymmetric(covariance);

    state.eigenvalues = eig.values.cwiseMax(0.0);
    state.components =
        eig.vectors.leftCols(static_cast<Eigen::Index>(k)).transpose();
    return state;
}

Matrix pcaTransform(const Matrix& X, const PcaState& state) {
    if (X.cols() != state.mean.size()) {
        throw DataError("pcaTransform: feature count does not match the fitted projection");
    }
    return (X.rowwise() - state.mean.transpose()) * state.components.transpose();
}

Matrix tableToMatrix(const Table& table, const std::vector<std::string>& names) {
    Matrix X(static_cast<Eigen::Index>(table.rowCount()),
             static_cast<Eigen::Index>(names.size()));
    for (std::size_t c = 0; c < names.size(); ++c) {
        const std::size_t idx = table.columnIndex(names[c]);
        if (table.schemaAt(idx).kind != ColumnKind::Numeric) {
            throw DataError("tableToMatrix: column '" + names[c] + "' is not numeric");
        }
        const Column& col = table.column(idx);
        for (std::size_t r = 0; r < table.rowCount(); ++r) {
            if (col.isMissing(r)) {
                throw DataError("tableToMatrix: column '" + names[c] + "' has missing cells");
            }
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col.numeric()[r];
        }
    }
    return X;
}

Labels encodeTarget(const Table& table, const std::vector<std::string>& classLabels) {
    const std::size_t idx = table.targetIndex();
    if (table.schemaAt(idx).kind != ColumnKind::Categorical) {
        throw DataError("encodeTarget: target column must be categorical");
    }
    const Column& col = table.column(idx);
    Labels y(table.rowCount());
    for (std::size_t r = 0; r < table.rowCount(); ++r) {
        if (col.isMissing(r)) throw DataError("encodeTarget: target has missing cells");
        const auto it = std::find(classLabels.begin(), classLabels.end(), col.labels()[r]);
        if (it == classLabels.end()) {
            throw DataError("encodeTarget: unknown class label '" + col.labels()[r] + "'");
        }
        y[r] = static_cast<int>(it - classLabels.begin());
    }
    return y;
}

FitResult fitPreprocess(const Table& train, const PreprocessOptions& options) {
    FitResult result;
    PreprocessState& state = result.state;

    const std::size_t targetIdx = train.targetIndex();
    for (std::size_t c = 0; c < train.columnCount(); ++c) {
        const ColumnSchema& schema = train.schemaAt(c);
        if (schema.role == ColumnRole::Identifier) continue;
        if (c == targetIdx) {
            if (schema.kind != ColumnKind::Categorical) {
                throw DataError("fitPreprocess: target column must be categorical");
            }
            result.classLabels =
                fitEncoder(train, schema.name, EncodingMode::Integer).categories;
            if (result.classLabels.size() < 2) {
                throw DataError("fitPreprocess: training data holds a single class");
            }
            continue;
        }
        if (schema.kind == ColumnKind::Numeric) {
            state.imputeValues.emplace_back(schema.name,
                                            imputeValue(train, schema.name, options.imputation));
        } else {
            state.encoders.push_back(fitEncoder(train, schema.name, options.encoding));
        }
    }

    // Replay imputation/encoding on the training rows to get the candidate
    // feature matrix, then select, then fit the scaler on the survivors.
    Table encoded = train;
    for (const auto& [name, value] : state.imputeValues) {
        encoded = imputeWith(encoded, name, value);
    }
    for (const EncoderMap& encoder : state.encoders) {
        encoded = applyEncoder(encoded, encoder);
    }
    std::vector<std::string> candidates;
    for (std::size_t c = 0; c < encoded.columnCount(); ++c) {
        const ColumnSchema& schema = encoded.schemaAt(c);
        if (schema.role == ColumnRole::Feature && schema.kind == ColumnKind::Numeric) {
            candidates.push_back(schema.name);
        }
    }
    if (candidates.empty()) throw DataError("fitPreprocess: no usable feature columns");

    const Matrix X = tableToMatrix(encoded, candidates);
    const Labels y = encodeTarget(train, result.classLabels);
    result.report =
        selectFeatures(X, y, candidates, options.pThreshold, options.corrThreshold);
    state.selectedFeatures = result.report.selected;

    Matrix selected(X.rows(), static_cast<Eigen::Index>(state.selectedFeatures.size()));
    for (std::size_t c = 0; c < state.selectedFeatures.size(); ++c) {
        const auto it =
            std::find(candidates.begin(), candidates.end(), state.selectedFeatures[c]);
        selected.col(static_cast<Eigen::Index>(c)) = X.col(it - candidates.begin());
    }

    state.scaling = options.scaling;
    if (state.scaling) {
        state.scaler = minMaxFit(selected);
        selected = minMaxTransform(selected, state.scaler);
    }
    // The 2-D projection backs the test-set scatter; skip it when the
    // surviving feature count cannot support the requested components.
    if (options.pcaComponents >= 1 && options.pcaComponents <= state.selectedFeatures.size() &&
        selected.rows() >= 2) {
        state.pca = pcaFit(selected, options.pcaComponents);
    }
    return result;
}

Matrix applyPreprocess(const Table& table, const PreprocessState& state) {
    std::vector<std::string> missing;
    for (const auto& [name, value] : state.imputeValues) {
        if (!table.hasColumn(name)) missing.push_back(name);
    }
    for (const EncoderMap& encoder : state.encoders) {
        if (!table.hasColumn(encoder.column)) missing.push_back(encoder.column);
    }
    if (!missing.empty()) {
        std::string joined;
        for (const std::string& name : missing) {
            if (!joined.empty()) joined += ", ";
            joined += "'" + name + "'";
        }
        throw DataError("missing feature columns: " + joined);
    }

    Table encoded = table;
    for (const auto& [name, value] : state.imputeValues) {
        encoded = imputeWith(encoded, name, value);
    }
    for (const EncoderMap& encoder : state.encoders) {
        encoded = applyEncoder(encoded, encoder);
    }
    Matrix X = tableToMatrix(encoded, state.selectedFeatures);
    if (state.scaling) X = minMaxTransform(X, state.scaler);
    return X;
}

}  // namespace tabml
