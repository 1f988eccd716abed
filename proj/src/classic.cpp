#include <tabml/classic.hpp>

#include <tabml/errors.hpp>

#include "classic_detail.hpp"

#include <array>
#include <cmath>

namespace tabml {
namespace {

const std::array<std::string, 8> kKindNames = {
    "logistic",      "lda",           "knn", "naive_bayes",
    "decision_tree", "random_forest", "svm", "neural",
};

const std::map<std::string, double> kNoHyper;
const std::map<std::string, double> kLogisticHyper = {
    {"learning_rate", 0.1}, {"epochs", 500.0}, {"l2", 1e-4}};
const std::map<std::string, double> kKnnHyper = {{"k", 5.0}, {"p", 2.0}};
const std::map<std::string, double> kTreeHyper = {{"max_depth", 12.0}, {"min_split", 2.0}};
const std::map<std::string, double> kForestHyper = {{"n_trees", 10.0},
                                                    {"max_depth", 12.0},
                                                    {"min_split", 2.0},
                                                    {"bootstrap", 1.0},
                                                    {"feature_subsample", 1.0}};
const std::map<std::string, double> kSvmHyper = {{"lambda", 1e-3}, {"epochs", 200.0}};

// Resolved hyperparameters: defaults overlaid with the spec's entries,
// rejecting unknown keys.
std::map<std::string, double> resolveHyper(const ClassifierSpec& spec) {
    std::map<std::string, double> resolved = hyperparameterDefaults(spec.kind);
    for (const auto& [key, value] : spec.hyper) {
        if (resolved.find(key) == resolved.end()) {
            throw ConfigError("unknown hyperparameter '" + key + "' for model kind '" +
                              modelKindName(spec.kind) + "'");
        }
        resolved[key] = value;
    }
    return resolved;
}

std::size_t asCount(const std::map<std::string, double>& hyper, const std::string& key,
                    std::size_t minimum) {
    const double value = hyper.at(key);
    if (!(value >= static_cast<double>(minimum)) || value != std::floor(value)) {
        throw ConfigError("hyperparameter '" + key + "' must be an integer >= " +
                          std::to_string(minimum));
    }
    return static_cast<std::size_t>(value);
}

ClassicModel fitLogistic(const ClassifierSpec& spec, const Matrix& X, const Labels& y,
                         int nClasses);
ClassicModel fitLda(const Matrix& X, const Labels& y, int nClasses);
ClassicModel fitKnn(const ClassifierSpec& spec, const Matrix& X, const Labels& y, int nClasses);
ClassicModel fitNaiveBayes(const Matrix& X, const Labels& y, int nClasses);
ClassicModel fitSvm(const ClassifierSpec& spec, const Matrix& X, const Labels& y, int nClasses);

}  // namespace

const std::string& modelKindName(ModelKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

ModelKind modelKindFromName(const std::string& name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) return static_cast<ModelKind>(i);
    }
    throw ConfigError("unknown model kind '" + name + "'");
}

const std::map<std::string, double>& hyperparameterDefaults(ModelKind kind) {
    switch (kind) {
        case ModelKind::Logistic: return kLogisticHyper;
        case ModelKind::Knn: return kKnnHyper;
        case ModelKind::DecisionTree: return kTreeHyper;
        case ModelKind::RandomForest: return kForestHyper;
        case ModelKind::Svm: return kSvmHyper;
        default: return kNoHyper;
    }
}

ClassicModel fitClassifier(const ClassifierSpec& spec, const Matrix& X, const Labels& y,
                           int nClasses) {
    if (static_cast<std::size_t>(X.rows()) != y.size()) {
        throw DataError("fitClassifier: row/label count mismatch");
    }
    if (X.rows() == 0) throw DataError("fitClassifier: empty training set");
    detail::requireLabelsInRange(y, nClasses, "fitClassifier");

    switch (spec.kind) {
        case ModelKind::Logistic: return fitLogistic(spec, X, y, nClasses);
        case ModelKind::Lda: {
            resolveHyper(spec);
            return fitLda(X, y, nClasses);
        }
        case ModelKind::Knn: return fitKnn(spec, X, y, nClasses);
        case ModelKind::NaiveBayes: {
            resolveHyper(spec);
            return fitNaiveBayes(X, y, nClasses);
        }
        case ModelKind::DecisionTree: {
            const auto hyper = resolveHyper(spec);
            std::vector<std::size_t> rows(static_cast<std::size_t>(X.rows()));
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            ClassicModel model;
            model.kind = spec.kind;
            model.params = growTree(X, y, rows, nClasses, asCount(hyper, "max_depth", 0),
                                    asCount(hyper, "min_split", 1), 0, nullptr);
            return model;
        }
        case ModelKind::RandomForest: {
            const auto hyper = resolveHyper(spec);
            const std::size_t nTrees = asCount(hyper, "n_trees", 1);
            const std::size_t maxDepth = asCount(hyper, "max_depth", 0);
            const std::size_t minSplit = asCount(hyper, "min_split", 1);
            const bool bootstrap = hyper.at("bootstrap") != 0.0;
            const bool subsample = hyper.at("feature_subsample") != 0.0;
            const auto n = static_cast<std::size_t>(X.rows());
            const std::size_t perSplit =
                subsample ? static_cast<std::size_t>(
                                std::ceil(std::sqrt(static_cast<double>(X.cols()))))
                          : 0;

            ForestModel forest;
            forest.nClasses = nClasses;
            for (std::size_t t = 0; t < nTrees; ++t) {
                Xorshift64Star rng(deriveSeed(spec.seed, t));
                std::vector<std::size_t> rows(n);
                if (bootstrap) {
                    for (std::size_t i = 0; i < n; ++i) {
                        rows[i] = static_cast<std::size_t>(rng.nextBelow(n));
                    }
                } else {
                    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
                }
                forest.trees.push_back(growTree(X, y, rows, nClasses, maxDepth, minSplit,
                                                perSplit, subsample ? &rng : nullptr));
            }
            ClassicModel model;
            model.kind = spec.kind;
            model.params = std::move(forest);
            return model;
        }
        case ModelKind::Svm: return fitSvm(spec, X, y, nClasses);
        case ModelKind::Neural:
            throw ConfigError("fitClassifier: the neural network is not a classic kind");
    }
    throw ConfigError("fitClassifier: unhandled model kind");
}

namespace {

Labels predictTree(const TreeModel& tree, const Matrix& X) {
    Labels out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        int node = 0;
        while (!tree.nodes[static_cast<std::size_t>(node)].leaf) {
            const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
            node = X(r, n.feature) <= n.threshold ? n.left : n.right;
        }
        out[static_cast<std::size_t>(r)] = tree.nodes[static_cast<std::size_t>(node)].label;
    }
    return out;
}

Matrix linearScores(const Matrix& weights, const Vector& bias, const Matrix& X) {
    if (X.cols() != weights.cols()) {
        throw DataError("predict: feature count does not match the fitted model");
    }
    return (X * weights.transpose()).rowwise() + bias.transpose();
}

Matrix naiveBayesLogPosteriors(const NaiveBayesModel& nb, const Matrix& X) {
    if (X.cols() != nb.means.cols()) {
        throw DataError("predict: feature count does not match the fitted model");
    }
    const Eigen::Index C = nb.means.rows();
    Matrix logPost(X.rows(), C);
    for (Eigen::Index c = 0; c < C; ++c) {
        Vector scores = Vector::Constant(X.rows(), nb.logPriors[c]);
        for (Eigen::Index f = 0; f < nb.means.cols(); ++f) {
            const double var = nb.variances(c, f);
            const double logNorm = -0.5 * std::log(2.0 * M_PI * var);
            scores.array() += logNorm -
                              (X.col(f).array() - nb.means(c, f)).square() / (2.0 * var);
        }
        logPost.col(c) = scores;
    }
    return logPost;
}

Labels argmaxRows(const Matrix& scores) {
    Labels out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        out[static_cast<std::size_t>(r)] = detail::argmaxRow(scores.row(r));
    }
    return out;
}

}  // namespace

Labels predictClassic(const ClassicModel& model, const Matrix& X) {
    switch (model.kind) {
        case ModelKind::Logistic: {
            const auto& m = std::get<LogisticModel>(model.params);
            return argmaxRows(linearScores(m.weights, m.bias, X));
        }
        case ModelKind::Lda: {
            const auto& m = std::get<LdaModel>(model.params);
            return argmaxRows(linearScores(m.coef, m.intercept, X));
        }
        case ModelKind::Knn: {
            const auto& m = std::get<KnnModel>(model.params);
            return knnPredict(m.trainX, m.trainY, X, m.k, m.p, m.nClasses);
        }
        case ModelKind::NaiveBayes: {
            const auto& m = std::get<NaiveBayesModel>(model.params);
            return argmaxRows(naiveBayesLogPosteriors(m, X));
        }
        case ModelKind::DecisionTree:
            return predictTree(std::get<TreeModel>(model.params), X);
        case ModelKind::RandomForest: {
            const auto& m = std::get<ForestModel>(model.params);
            Labels out(static_cast<std::size_t>(X.rows()));
            std::vector<Labels> perTree;
            perTree.reserve(m.trees.size());
            for (const TreeModel& tree : m.trees) perTree.push_back(predictTree(tree, X));
            for (std::size_t r = 0; r < out.size(); ++r) {
                std::vector<int> votes(static_cast<std::size_t>(m.nClasses), 0);
                for (const Labels& preds : perTree) ++votes[static_cast<std::size_t>(preds[r])];
                int best = 0;
                for (int c = 1; c < m.nClasses; ++c) {
                    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) {
                        best = c;
                    }
                }
                out[r] = best;
            }
            return out;
        }
        case ModelKind::Svm: {
            const auto& m = std::get<SvmModel>(model.params);
            return argmaxRows(linearScores(m.weights, m.bias, X));
        }
        case ModelKind::Neural: break;
    }
    throw ConfigError("predictClassic: unhandled model kind");
}

std::optional<Matrix> predictProbabilities(const ClassicModel& model, const Matrix& X) {
    switch (model.kind) {
        case ModelKind::Logistic: {
            const auto& m = std::get<LogisticModel>(model.params);
            Matrix scores = linearScores(m.weights, m.bias, X);
            detail::softmaxRowsInPlace(scores);
            return scores;
        }
        case ModelKind::Lda: {
            const auto& m = std::get<LdaModel>(model.params);
            Matrix scores = linearScores(m.coef, m.intercept, X);
            detail::softmaxRowsInPlace(scores);
            return scores;
        }
        case ModelKind::Knn: {
            const auto& m = std::get<KnnModel>(model.params);
            return knnVoteShares(m.trainX, m.trainY, X, m.k, m.p, m.nClasses);
        }
        case ModelKind::NaiveBayes: {
            const auto& m = std::get<NaiveBayesModel>(model.params);
            Matrix scores = naiveBayesLogPosteriors(m, X);
            detail::softmaxRowsInPlace(scores);
            return scores;
        }
        case ModelKind::DecisionTree: {
            const auto& m = std::get<TreeModel>(model.params);
            Matrix probs(X.rows(), m.nClasses);
            for (Eigen::Index r = 0; r < X.rows(); ++r) {
                int node = 0;
                while (!m.nodes[static_cast<std::size_t>(node)].leaf) {
                    const TreeNode& n = m.nodes[static_cast<std::size_t>(node)];
                    node = X(r, n.feature) <= n.threshold ? n.left : n.right;
                }
                const auto& hist = m.nodes[static_cast<std::size_t>(node)].histogram;
                double total = 0.0;
                for (double h : hist) total += h;
                for (int c = 0; c < m.nClasses; ++c) {
                    probs(r, c) = hist[static_cast<std::size_t>(c)] / total;
                }
            }
            return probs;
        }
        case ModelKind::RandomForest: {
            const auto& m = std::get<ForestModel>(model.params);
            Matrix probs = Matrix::Zero(X.rows(), m.nClasses);
            for (const TreeModel& tree : m.trees) {
                const Labels preds = predictTree(tree, X);
                for (Eigen::Index r = 0; r < X.rows(); ++r) {
                    probs(r, preds[static_cast<std::size_t>(r)]) += 1.0;
                }
            }
            probs /= static_cast<double>(m.trees.size());
            return probs;
        }
        case ModelKind::Svm:
            return std::nullopt;  // margins are not calibrated probabilities
        case ModelKind::Neural: break;
    }
    throw ConfigError("predictProbabilities: unhandled model kind");
}

namespace {

ClassicModel fitLogistic(const ClassifierSpec& spec, const Matrix& X, const Labels& y,
                         int nClasses) {
    detail::requireMultipleClasses(y, "fitLogistic");
    const auto hyper = resolveHyper(spec);
    const double lr = hyper.at("learning_rate");
    const std::size_t epochs = asCount(hyper, "epochs", 0);
    const double l2 = hyper.at("l2");
    if (!(lr > 0.0)) throw ConfigError("hyperparameter 'learning_rate' must be positive");
    if (l2 < 0.0) throw ConfigError("hyperparameter 'l2' must be non-negative");

    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    const double nd = static_cast<double>(n);

    Matrix Y = Matrix::Zero(n, nClasses);
    for (Eigen::Index r = 0; r < n; ++r) Y(r, y[static_cast<std::size_t>(r)]) = 1.0;

    LogisticModel m;
    m.weights = Matrix::Zero(nClasses, d);
    m.bias = Vector::Zero(nClasses);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        Matrix P = (X * m.weights.transpose()).rowwise() + m.bias.transpose();
        detail::softmaxRowsInPlace(P);
        const Matrix G = P - Y;
        m.weights -= lr * ((G.transpose() * X) / nd + l2 * m.weights);
        m.bias -= lr * (G.colwise().sum().transpose() / nd);
    }
    if (!m.weights.allFinite() || !m.bias.allFinite()) {
        throw NumericError("fitLogistic: training diverged");
    }
    ClassicModel model;
    model.kind = ModelKind::Logistic;
    model.params = std::move(m);
    return model;
}

ClassicModel fitLda(const Matrix& X, const Labels& y, int nClasses) {
    detail::requireMultipleClasses(y, "fitLda");
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (n <= nClasses) throw DataError("fitLda: need more rows than classes");

    std::vector<double> counts(static_cast<std::size_t>(nClasses), 0.0);
    Matrix means = Matrix::Zero(nClasses, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        const int c = y[static_cast<std::size_t>(r)];
        counts[static_cast<std::size_t>(c)] += 1.0;
        means.row(c) += X.row(r);
    }
    for (int c = 0; c < nClasses; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0.0) {
            means.row(c) /= counts[static_cast<std::size_t>(c)];
        }
    }

    Matrix scatter = Matrix::Zero(d, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Vector dev = (X.row(r) - means.row(y[static_cast<std::size_t>(r)])).transpose();
        scatter.noalias() += dev * dev.transpose();
    }
    Matrix covariance = scatter / static_cast<double>(n - nClasses);
    covariance += 1e-6 * Matrix::Identity(d, d);

    const Eigen::LDLT<Matrix> solver(covariance);
    if (solver.info() != Eigen::Success) {
        throw NumericError("fitLda: covariance factorization failed");
    }

    LdaModel m;
    m.coef = Matrix::Zero(nClasses, d);
    m.intercept = Vector::Zero(nClasses);
    const double nd = static_cast<double>(n);
    for (int c = 0; c < nClasses; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0.0) {
            // Class absent from training data: never the argmax.
            m.intercept[c] = -std::numeric_limits<double>::infinity();
            continue;
        }
        const Vector coef = solver.solve(means.row(c).transpose());
        if (!coef.allFinite()) {
            throw NumericError("fitLda: singular pooled covariance");
        }
        m.coef.row(c) = coef.transpose();
        m.intercept[c] = -0.5 * means.row(c).dot(coef) +
                         std::log(counts[static_cast<std::size_t>(c)] / nd);
    }
    ClassicModel model;
    model.kind = ModelKind::Lda;
    model.params = std::move(m);
    return model;
}

ClassicModel fitKnn(const ClassifierSpec& spec, const Matrix& X, const Labels& y,
                    int nClasses) {
    const auto hyper = resolveHyper(spec);
    const std::size_t k = asCount(hyper, "k", 1);
    const double p = hyper.at("p");
    if (k > static_cast<std::size_t>(X.rows())) {
        throw ConfigError("hyperparameter 'k' exceeds the training row count");
    }
    if (!(p >= 1.0)) throw ConfigError("hyperparameter 'p' must be >= 1");

    KnnModel m;
    m.trainX = X;
    m.trainY = y;
    m.k = static_cast<int>(k);
    m.p = p;
    m.nClasses = nClasses;
    ClassicModel model;
    model.kind = ModelKind::Knn;
    model.params = std::move(m);
    return model;
}

ClassicModel fitNaiveBayes(const Matrix& X, const Labels& y, int nClasses) {
    detail::requireMultipleClasses(y, "fitNaiveBayes");
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();

    NaiveBayesModel m;
    m.means = Matrix::Zero(nClasses, d);
    m.variances = Matrix::Zero(nClasses, d);
    m.logPriors = Vector::Zero(nClasses);
    std::vector<double> counts(static_cast<std::size_t>(nClasses), 0.0);
    for (Eigen::Index r = 0; r < n; ++r) {
        const int c = y[static_cast<std::size_t>(r)];
        counts[static_cast<std::size_t>(c)] += 1.0;
        m.means.row(c) += X.row(r);
    }
    for (int c = 0; c < nClasses; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0.0) {
            m.means.row(c) /= counts[static_cast<std::size_t>(c)];
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        const int c = y[static_cast<std::size_t>(r)];
        m.variances.row(c) += (X.row(r) - m.means.row(c)).array().square().matrix();
    }
    for (int c = 0; c < nClasses; ++c) {
        const double count = counts[static_cast<std::size_t>(c)];
        if (count > 0.0) {
            m.variances.row(c) /= count;
            m.logPriors[c] = std::log(count / static_cast<double>(n));
        } else {
            m.logPriors[c] = -std::numeric_limits<double>::infinity();
        }
    }
    m.variances = m.variances.cwiseMax(1e-9);

    ClassicModel model;
    model.kind = ModelKind::NaiveBayes;
    model.params = std::move(m);
    return model;
}

ClassicModel fitSvm(const ClassifierSpec& spec, const Matrix& X, const Labels& y,
                    int nClasses) {
    detail::requireMultipleClasses(y, "fitSvm");
    const auto hyper = resolveHyper(spec);
    const double lambda = hyper.at("lambda");
    const std::size_t epochs = asCount(hyper, "epochs", 1);
    if (!(lambda > 0.0)) throw ConfigError("hyperparameter 'lambda' must be positive");

    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    const double nd = static_cast<double>(n);

    SvmModel m;
    m.weights = Matrix::Zero(nClasses, d);
    m.bias = Vector::Zero(nClasses);
    for (int c = 0; c < nClasses; ++c) {
        Vector sign(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            sign[r] = y[static_cast<std::size_t>(r)] == c ? 1.0 : -1.0;
        }
        Vector w = Vector::Zero(d);
        double b = 0.0;
        for (std::size_t t = 1; t <= epochs; ++t) {
            const double lr = 1.0 / (lambda * static_cast<double>(t));
            const Vector margins = sign.array() * ((X * w).array() + b);
            Vector gradW = lambda * w;
            double gradB = 0.0;
            for (Eigen::Index r = 0; r < n; ++r) {
                if (margins[r] < 1.0) {
                    gradW -= (sign[r] / nd) * X.row(r).transpose();
                    gradB -= sign[r] / nd;
                }
            }
            w -= lr * gradW;
            b -= lr * gradB;
        }
        if (!w.allFinite() || !std::isfinite(b)) {
            throw NumericError("fitSvm: training diverged");
        }
        m.weights.row(c) = w.transpose();
        m.bias[c] = b;
    }
    ClassicModel model;
    model.kind = ModelKind::Svm;
    model.params = std::move(m);
    return model;
}

}  // namespace
}  // namespace tabml
