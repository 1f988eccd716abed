#include <tabml/neural.hpp>

#include <tabml/errors.hpp>
#include <tabml/rng.hpp>

#include <cmath>
#include <string>

namespace tabml {
namespace {

// Layer widths from input to output, with the default hidden stack filled in.
std::vector<std::size_t> layerWidths(const NetworkConfig& config) {
    if (config.inputDim < 1 || config.outputDim < 1) {
        throw ConfigError("network: input and output dimensions must be at least 1");
    }
    std::vector<std::size_t> widths;
    widths.push_back(config.inputDim);
    const std::vector<std::size_t>& hidden = config.hiddenLayers.empty()
                                                 ? defaultHiddenLayers(config.inputDim,
                                                                       config.outputDim)
                                                 : config.hiddenLayers;
    for (std::size_t w : hidden) {
        if (w < 1) throw ConfigError("network: zero-width hidden layer");
        widths.push_back(w);
    }
    widths.push_back(config.outputDim);
    return widths;
}

double meanBatchLoss(const NetworkParams& params, const Matrix& X, const Matrix& yOneHot) {
    const ForwardPass pass = forward(params, X);
    return crossEntropyLoss(pass.logits, yOneHot);
}

void validateTargets(const Matrix& X, const Matrix& yOneHot) {
    if (X.rows() != yOneHot.rows()) {
        throw DataError("network: feature and target row counts differ");
    }
    for (Eigen::Index r = 0; r < yOneHot.rows(); ++r) {
        double sum = 0.0;
        double top = 0.0;
        for (Eigen::Index c = 0; c < yOneHot.cols(); ++c) {
            sum += yOneHot(r, c);
            top = std::max(top, yOneHot(r, c));
        }
        if (sum != 1.0 || top != 1.0) {
            throw DataError("network: target row " + std::to_string(r) + " is not one-hot");
        }
    }
}

}  // namespace

std::vector<std::size_t> defaultHiddenLayers(std::size_t inputDim, std::size_t outputDim) {
    const auto width = static_cast<std::size_t>(
        std::ceil(static_cast<double>(inputDim + outputDim) / 2.0));
    return std::vector<std::size_t>(6, width);
}

NetworkParams initNetwork(const NetworkConfig& config) {
    const std::vector<std::size_t> widths = layerWidths(config);
    Xorshift64Star rng(deriveSeed(config.seed, 0));

    NetworkParams params;
    for (std::size_t l = 1; l < widths.size(); ++l) {
        const auto rows = static_cast<Eigen::Index>(widths[l]);
        const auto cols = static_cast<Eigen::Index>(widths[l - 1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(widths[l - 1]));
        Matrix W(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                W(r, c) = rng.nextUniform(-limit, limit);
            }
        }
        params.weights.push_back(std::move(W));
        params.biases.push_back(Vector::Zero(rows));
    }
    return params;
}

ForwardPass forward(const NetworkParams& params, const Matrix& X) {
    if (params.weights.empty()) throw ConfigError("forward: uninitialized network");
    if (X.cols() != params.weights.front().cols()) {
        throw DataError("forward: input width does not match the network");
    }
    ForwardPass pass;
    pass.activations.push_back(X);
    Matrix a = X;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        Matrix z = (a * params.weights[l].transpose()).rowwise() +
                   params.biases[l].transpose();
        if (!z.allFinite()) throw NumericError("forward: non-finite activation");
        if (l + 1 < params.weights.size()) {
            a = z.cwiseMax(0.0);
            pass.activations.push_back(a);
        } else {
            pass.logits = std::move(z);
        }
    }
    pass.probabilities = pass.logits;
    for (Eigen::Index r = 0; r < pass.probabilities.rows(); ++r) {
        const double zmax = pass.probabilities.row(r).maxCoeff();
        pass.probabilities.row(r) =
            (pass.probabilities.row(r).array() - zmax).exp();
        pass.probabilities.row(r) /= pass.probabilities.row(r).sum();
    }
    return pass;
}

double crossEntropyLoss(const Matrix& logits, const Matrix& yOneHot) {
    if (logits.rows() != yOneHot.rows() || logits.cols() != yOneHot.cols()) {
        throw DataError("crossEntropyLoss: shape mismatch");
    }
    double total = 0.0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double zmax = logits.row(r).maxCoeff();
        const double logSumExp =
            zmax + std::log((logits.row(r).array() - zmax).exp().sum());
        total += logSumExp - logits.row(r).dot(yOneHot.row(r));
    }
    return total / static_cast<double>(logits.rows());
}

Gradients backprop(const NetworkParams& params, const ForwardPass& pass,
                   const Matrix& yOneHot) {
    const std::size_t L = params.weights.size();
    const double n = static_cast<double>(yOneHot.rows());

    Gradients grads;
    grads.weights.resize(L);
    grads.biases.resize(L);

    // Softmax + cross-entropy gives the output delta directly.
    Matrix delta = (pass.probabilities - yOneHot) / n;
    for (std::size_t l = L; l-- > 0;) {
        grads.weights[l] = delta.transpose() * pass.activations[l];
        grads.biases[l] = delta.colwise().sum().transpose();
        if (l > 0) {
            // ReLU mask: a zero activation means a zero (or negative)
            // pre-activation, so its gradient is dropped.
            delta = (delta * params.weights[l]).cwiseProduct(
                (pass.activations[l].array() > 0.0).cast<double>().matrix());
        }
    }
    return grads;
}

TrainResult trainNetwork(NetworkParams params, const Matrix& X, const Matrix& yOneHot,
                         const NetworkConfig& config) {
    validateTargets(X, yOneHot);
    const auto n = static_cast<std::size_t>(X.rows());
    if (n == 0) throw DataError("trainNetwork: empty training set");
    const std::size_t batchSize = config.batchSize < 1 ? n : config.batchSize;

    Xorshift64Star shuffleRng(deriveSeed(config.seed, 1));
    TrainResult result;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const std::vector<std::size_t> order = randomPermutation(n, shuffleRng);
        double lossSum = 0.0;
        for (std::size_t start = 0; start < n; start += batchSize) {
            const std::size_t count = std::min(batchSize, n - start);
            Matrix bX(static_cast<Eigen::Index>(count), X.cols());
            Matrix bY(static_cast<Eigen::Index>(count), yOneHot.cols());
            for (std::size_t i = 0; i < count; ++i) {
                bX.row(static_cast<Eigen::Index>(i)) =
                    X.row(static_cast<Eigen::Index>(order[start + i]));
                bY.row(static_cast<Eigen::Index>(i)) =
                    yOneHot.row(static_cast<Eigen::Index>(order[start + i]));
            }
            const ForwardPass pass = forward(params, bX);
            lossSum += crossEntropyLoss(pass.logits, bY) * static_cast<double>(count);
            const Gradients grads = backprop(params, pass, bY);
            for (std::size_t l = 0; l < params.weights.size(); ++l) {
                params.weights[l] -= config.learningRate * grads.weights[l];
                params.biases[l] -= config.learningRate * grads.biases[l];
            }
        }
        const double epochLoss = lossSum / static_cast<double>(n);
        if (!std::isfinite(epochLoss)) {
            throw NumericError("trainNetwork: loss diverged at epoch " +
                               std::to_string(epoch));
        }
        result.epochLosses.push_back(epochLoss);
    }
    result.params = std::move(params);
    return result;
}

double gradientCheck(const NetworkParams& params, const Matrix& X, const Matrix& yOneHot,
                     double epsilon) {
    const ForwardPass pass = forward(params, X);
    const Gradients grads = backprop(params, pass, yOneHot);

    NetworkParams probe = params;
    double worst = 0.0;
    auto compare = [&](double& value, double analytic) {
        const double saved = value;
        value = saved + epsilon;
        const double plus = meanBatchLoss(probe, X, yOneHot);
        value = saved - epsilon;
        const double minus = meanBatchLoss(probe, X, yOneHot);
        value = saved;
        const double fd = (plus - minus) / (2.0 * epsilon);
        const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-8});
        worst = std::max(worst, std::abs(analytic - fd) / scale);
    };

    for (std::size_t l = 0; l < probe.weights.size(); ++l) {
        for (Eigen::Index r = 0; r < probe.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < probe.weights[l].cols(); ++c) {
                compare(probe.weights[l](r, c), grads.weights[l](r, c));
            }
            compare(probe.biases[l][r], grads.biases[l][r]);
        }
    }
    return worst;
}

Labels predictNetwork(const NetworkParams& params, const Matrix& X) {
    const ForwardPass pass = forward(params, X);
    Labels out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index r = 0; r < pass.probabilities.rows(); ++r) {
        int best = 0;
        for (Eigen::Index c = 1; c < pass.probabilities.cols(); ++c) {
            if (pass.probabilities(r, c) > pass.probabilities(r, best)) {
                best = static_cast<int>(c);
            }
        }
        out[static_cast<std::size_t>(r)] = best;
    }
    return out;
}

Matrix oneHot(const Labels& y, int nClasses) {
    Matrix Y = Matrix::Zero(static_cast<Eigen::Index>(y.size()), nClasses);
    for (std::size_t r = 0; r < y.size(); ++r) {
        const int c = y[r];
        if (c < 0 || c >= nClasses) {
            throw DataError("oneHot: label " + std::to_string(c) + " outside [0, " +
                            std::to_string(nClasses) + ")");
        }
        Y(static_cast<Eigen::Index>(r), c) = 1.0;
    }
    return Y;
}

}  // namespace tabml
