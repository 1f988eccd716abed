#include <tabml/classic.hpp>

#include <tabml/errors.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace tabml {
namespace {

double entropyOf(const std::vector<double>& histogram, double total) {
    double entropy = 0.0;
    for (double count : histogram) {
        if (count > 0.0) {
            const double p = count / total;
            entropy -= p * std::log2(p);
        }
    }
    return entropy;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = -1.0;
};

struct Grower {
    const Matrix& X;
    const Labels& y;
    int nClasses;
    std::size_t maxDepth;   // 0 = unlimited
    std::size_t minSplit;
    std::size_t featureSubsample;  // 0 = consider every feature
    Xorshift64Star* rng;
    std::vector<TreeNode> nodes;

    std::vector<double> histogramOf(const std::vector<std::size_t>& rows) const {
        std::vector<double> hist(static_cast<std::size_t>(nClasses), 0.0);
        for (std::size_t r : rows) ++hist[static_cast<std::size_t>(y[r])];
        return hist;
    }

    // Candidate features for one split, in ascending index order. With
    // subsampling, a partial Fisher-Yates pass draws the set from `rng`.
    std::vector<int> candidateFeatures() const {
        const int d = static_cast<int>(X.cols());
        std::vector<int> features(static_cast<std::size_t>(d));
        for (int f = 0; f < d; ++f) features[static_cast<std::size_t>(f)] = f;
        if (featureSubsample == 0 || featureSubsample >= static_cast<std::size_t>(d)) {
            return features;
        }
        for (std::size_t i = 0; i < featureSubsample; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(
                        rng->nextBelow(static_cast<std::uint64_t>(d) - i));
            std::swap(features[i], features[j]);
        }
        features.resize(featureSubsample);
        std::sort(features.begin(), features.end());
        return features;
    }

    // Best (gain, feature, threshold) over midpoints between consecutive
    // distinct values; ties keep the first candidate scanned, i.e. the lower
    // feature index, then the lower threshold.
    SplitChoice bestSplit(const std::vector<std::size_t>& rows,
                          const std::vector<double>& parentHist) const {
        const double total = static_cast<double>(rows.size());
        const double parentEntropy = entropyOf(parentHist, total);
        SplitChoice best;

        std::vector<std::pair<double, int>> ordered(rows.size());
        for (const int f : candidateFeatures()) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                ordered[i] = {X(static_cast<Eigen::Index>(rows[i]), f), y[rows[i]]};
            }
            std::sort(ordered.begin(), ordered.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::vector<double> leftHist(static_cast<std::size_t>(nClasses), 0.0);
            std::vector<double> rightHist = parentHist;
            for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
                const auto label = static_cast<std::size_t>(ordered[i].second);
                leftHist[label] += 1.0;
                rightHist[label] -= 1.0;
                if (ordered[i].first == ordered[i + 1].first) continue;

                const double threshold = (ordered[i].first + ordered[i + 1].first) / 2.0;
                const double leftTotal = static_cast<double>(i + 1);
                const double rightTotal = total - leftTotal;
                const double children = (leftTotal / total) * entropyOf(leftHist, leftTotal) +
                                        (rightTotal / total) * entropyOf(rightHist, rightTotal);
                const double gain = parentEntropy - children;
                if (gain > best.gain) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = threshold;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int grow(const std::vector<std::size_t>& rows, std::size_t depth) {
        std::vector<double> hist = histogramOf(rows);
        int majority = 0;
        bool pure = true;
        for (int c = 0; c < nClasses; ++c) {
            if (hist[static_cast<std::size_t>(c)] > hist[static_cast<std::size_t>(majority)]) {
                majority = c;
            }
            if (hist[static_cast<std::size_t>(c)] > 0.0 &&
                hist[static_cast<std::size_t>(c)] < static_cast<double>(rows.size())) {
                pure = false;
            }
        }

        const bool depthLimited = maxDepth > 0 && depth >= maxDepth;
        SplitChoice split;
        if (!pure && !depthLimited && rows.size() >= minSplit) {
            split = bestSplit(rows, hist);
        }
        const int index = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (!split.found) {
            TreeNode& leaf = nodes.back();
            leaf.leaf = true;
            leaf.label = majority;
            leaf.histogram = std::move(hist);
            return index;
        }

        std::vector<std::size_t> leftRows;
        std::vector<std::size_t> rightRows;
        for (std::size_t r : rows) {
            if (X(static_cast<Eigen::Index>(r), split.feature) <= split.threshold) {
                leftRows.push_back(r);
            } else {
                rightRows.push_back(r);
            }
        }
        {
            TreeNode& node = nodes[static_cast<std::size_t>(index)];
            node.leaf = false;
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.label = majority;
            node.histogram = std::move(hist);
        }
        const int left = grow(leftRows, depth + 1);
        const int right = grow(rightRows, depth + 1);
        nodes[static_cast<std::size_t>(index)].left = left;
        nodes[static_cast<std::size_t>(index)].right = right;
        return index;
    }
};

}  // namespace

TreeModel growTree(const Matrix& X, const Labels& y, const std::vector<std::size_t>& rows,
                   int nClasses, std::size_t maxDepth, std::size_t minSplit,
                   std::size_t featureSubsample, Xorshift64Star* rng) {
    if (rows.empty()) throw DataError("growTree: no training rows");
    if (featureSubsample > 0 && rng == nullptr) {
        throw ConfigError("growTree: feature subsampling needs a random stream");
    }
    Grower grower{X, y, nClasses, maxDepth, minSplit, featureSubsample, rng, {}};
    grower.grow(rows, 0);
    TreeModel model;
    model.nodes = std::move(grower.nodes);
    model.nClasses = nClasses;
    return model;
}

}  // namespace tabml
