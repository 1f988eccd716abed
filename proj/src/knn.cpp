#include <tabml/classic.hpp>

#include <tabml/errors.hpp>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace tabml {
namespace {

// The k nearest training rows as (distance, row) pairs, distance ties
// resolved toward the lower row index.
std::vector<std::pair<double, std::size_t>> nearestNeighbors(
    const Matrix& trainX, const Eigen::Ref<const Eigen::RowVectorXd>& query, int k, double p) {
    std::vector<std::pair<double, std::size_t>> all;
    all.reserve(static_cast<std::size_t>(trainX.rows()));
    for (Eigen::Index r = 0; r < trainX.rows(); ++r) {
        all.emplace_back(minkowskiDistance(trainX.row(r), query, p),
                         static_cast<std::size_t>(r));
    }
    const auto kth = all.begin() + k;
    std::partial_sort(all.begin(), kth, all.end());
    all.resize(static_cast<std::size_t>(k));
    return all;
}

// Majority vote with the documented tie-breaks: most votes, then smallest
// summed neighbor distance, then lower class index.
int voteWinner(const std::vector<std::pair<double, std::size_t>>& neighbors,
               const Labels& trainY, int nClasses) {
    std::vector<int> votes(static_cast<std::size_t>(nClasses), 0);
    std::vector<double> summedDistance(static_cast<std::size_t>(nClasses), 0.0);
    for (const auto& [distance, row] : neighbors) {
        const auto c = static_cast<std::size_t>(trainY[row]);
        ++votes[c];
        summedDistance[c] += distance;
    }
    int best = -1;
    for (int c = 0; c < nClasses; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        if (votes[ci] == 0) continue;
        if (best < 0 || votes[ci] > votes[static_cast<std::size_t>(best)] ||
            (votes[ci] == votes[static_cast<std::size_t>(best)] &&
             summedDistance[ci] < summedDistance[static_cast<std::size_t>(best)])) {
            best = c;
        }
    }
    return best;
}

void validateKnnInputs(const Matrix& trainX, const Labels& trainY, const Matrix& query, int k,
                       double p) {
    if (trainX.rows() == 0) throw ConfigError("knnPredict: empty training set");
    if (static_cast<std::size_t>(trainX.rows()) != trainY.size()) {
        throw DataError("knnPredict: row/label count mismatch");
    }
    if (k < 1 || k > trainX.rows()) {
        throw ConfigError("knnPredict: k must lie in [1, training row count]");
    }
    if (!(p >= 1.0)) throw ConfigError("knnPredict: p must be >= 1");
    if (query.cols() != trainX.cols()) {
        throw DataError("knnPredict: query feature count does not match the training set");
    }
}

}  // namespace

double minkowskiDistance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                         const Eigen::Ref<const Eigen::RowVectorXd>& b, double p) {
    if (a.size() != b.size()) throw DataError("minkowskiDistance: length mismatch");
    if (!(p >= 1.0)) throw ConfigError("minkowskiDistance: p must be >= 1");
    double sum = 0.0;
    if (p == 1.0) {
        for (Eigen::Index i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
        return sum;
    }
    if (p == 2.0) {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const double diff = a[i] - b[i];
            sum += diff * diff;
        }
        return std::sqrt(sum);
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) sum += std::pow(std::abs(a[i] - b[i]), p);
    return std::pow(sum, 1.0 / p);
}

Labels knnPredict(const Matrix& trainX, const Labels& trainY, const Matrix& query, int k,
                  double p, int nClasses) {
    validateKnnInputs(trainX, trainY, query, k, p);
    Labels out(static_cast<std::size_t>(query.rows()));
    for (Eigen::Index r = 0; r < query.rows(); ++r) {
        const auto neighbors = nearestNeighbors(trainX, query.row(r), k, p);
        out[static_cast<std::size_t>(r)] = voteWinner(neighbors, trainY, nClasses);
    }
    return out;
}

Matrix knnVoteShares(const Matrix& trainX, const Labels& trainY, const Matrix& query, int k,
                     double p, int nClasses) {
    validateKnnInputs(trainX, trainY, query, k, p);
    Matrix shares = Matrix::Zero(query.rows(), nClasses);
    for (Eigen::Index r = 0; r < query.rows(); ++r) {
        const auto neighbors = nearestNeighbors(trainX, query.row(r), k, p);
        for (const auto& [distance, row] : neighbors) {
            shares(r, trainY[row]) += 1.0;
        }
        shares.row(r) /= static_cast<double>(k);
    }
    return shares;
}

}  // namespace tabml
