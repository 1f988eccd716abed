#include <doctest.h>

#include <tabml/classic.hpp>
#include <tabml/errors.hpp>
#include <tabml/rng.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace tabml;

namespace {

// Independent all-pairs KNN oracle: straightforward O(n^2) scan with its own
// distance code and the documented tie rules.
Labels knnOracle(const Matrix& trainX, const Labels& trainY, const Matrix& query, int k,
                 double p, int nClasses) {
    Labels out;
    for (int q = 0; q < query.rows(); ++q) {
        std::vector<std::pair<double, std::size_t>> distances;
        for (int t = 0; t < trainX.rows(); ++t) {
            double sum = 0.0;
            for (int c = 0; c < trainX.cols(); ++c) {
                sum += std::pow(std::abs(query(q, c) - trainX(t, c)), p);
            }
            distances.emplace_back(std::pow(sum, 1.0 / p), static_cast<std::size_t>(t));
        }
        std::sort(distances.begin(), distances.end());
        std::vector<int> votes(static_cast<std::size_t>(nClasses), 0);
        std::vector<double> voteDistance(static_cast<std::size_t>(nClasses), 0.0);
        for (int i = 0; i < k; ++i) {
            const auto cls = static_cast<std::size_t>(
                trainY[distances[static_cast<std::size_t>(i)].second]);
            votes[cls] += 1;
            voteDistance[cls] += distances[static_cast<std::size_t>(i)].first;
        }
        int best = 0;
        for (int cls = 1; cls < nClasses; ++cls) {
            const auto c = static_cast<std::size_t>(cls);
            const auto b = static_cast<std::size_t>(best);
            if (votes[c] > votes[b] ||
                (votes[c] == votes[b] && voteDistance[c] < voteDistance[b])) {
                best = cls;
            }
        }
        out.push_back(best);
    }
    return out;
}

// Two interleaved class patterns (linear and quadratic in the class index)
// plus seeded jitter; generic position, no exact ties.
void makeMulticlass(std::uint64_t seed, int n, int d, int nClasses, Matrix& X, Labels& y) {
    Xorshift64Star rng(seed);
    X.resize(n, d);
    y.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int cls = i % nClasses;
        y[static_cast<std::size_t>(i)] = cls;
        for (int c = 0; c < d; ++c) {
            const double base = c % 2 == 0 ? static_cast<double>(cls)
                                           : static_cast<double>((cls - 1) * (cls - 1));
            X(i, c) = base + rng.nextUniform(-0.3, 0.3);
        }
    }
}

ClassifierSpec specOf(ModelKind kind, std::uint64_t seed = 0) {
    ClassifierSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("documented hyperparameter defaults") {
    CHECK(hyperparameterDefaults(ModelKind::Knn).at("k") == 5.0);
    CHECK(hyperparameterDefaults(ModelKind::Knn).at("p") == 2.0);
    CHECK(hyperparameterDefaults(ModelKind::RandomForest).at("n_trees") == 10.0);
    CHECK(hyperparameterDefaults(ModelKind::DecisionTree).at("max_depth") == 12.0);
    CHECK(hyperparameterDefaults(ModelKind::Logistic).at("epochs") == 500.0);

    Matrix X(4, 1);
    X << 0, 1, 2, 3;
    Labels y = {0, 0, 1, 1};
    ClassifierSpec bogus = specOf(ModelKind::Knn);
    bogus.hyper["neighbours"] = 3.0;
    CHECK_THROWS_WITH_AS((void)fitClassifier(bogus, X, y, 2), doctest::Contains("neighbours"),
                         ConfigError);
}

TEST_CASE("model kind names round-trip") {
    for (ModelKind kind : {ModelKind::Logistic, ModelKind::Lda, ModelKind::Knn,
                           ModelKind::NaiveBayes, ModelKind::DecisionTree,
                           ModelKind::RandomForest, ModelKind::Svm, ModelKind::Neural}) {
        CHECK(modelKindFromName(modelKindName(kind)) == kind);
    }
    CHECK_THROWS_AS((void)modelKindFromName("boosting"), ConfigError);
}

TEST_CASE("minkowski distance closed forms") {
    Eigen::RowVectorXd a(2);
    a << 0, 0;
    Eigen::RowVectorXd b(2);
    b << 3, 4;
    CHECK(minkowskiDistance(a, b, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(minkowskiDistance(a, b, 1.0) == doctest::Approx(7.0).epsilon(1e-15));
    // p = 3: (27 + 64)^(1/3).
    CHECK(minkowskiDistance(a, b, 3.0) == doctest::Approx(std::cbrt(91.0)).epsilon(1e-12));
    CHECK(minkowskiDistance(a, a, 2.0) == 0.0);
}

TEST_CASE("logistic regression separates a wide-margin line") {
    Matrix X(20, 1);
    Labels y(20);
    for (int i = 0; i < 10; ++i) {
        X(i, 0) = -1.0 - 0.05 * i;
        y[static_cast<std::size_t>(i)] = 0;
        X(10 + i, 0) = 1.0 + 0.05 * i;
        y[static_cast<std::size_t>(10 + i)] = 1;
    }
    const ClassicModel model = fitClassifier(specOf(ModelKind::Logistic), X, y, 2);
    const Labels predicted = predictClassic(model, X);
    CHECK(predicted == y);

    // Probability at the learned boundary is 1/2.
    const auto& params = std::get<LogisticModel>(model.params);
    const double boundary =
        -(params.bias[1] - params.bias[0]) / (params.weights(1, 0) - params.weights(0, 0));
    Matrix at(1, 1);
    at << boundary;
    const auto probabilities = predictProbabilities(model, at);
    REQUIRE(probabilities.has_value());
    CHECK((*probabilities)(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("logistic probabilities are normalized on random input") {
    Matrix X;
    Labels y;
    makeMulticlass(41, 90, 3, 3, X, y);
    const ClassicModel model = fitClassifier(specOf(ModelKind::Logistic), X, y, 3);
    const Matrix Q = Matrix::Random(25, 3);
    const auto probabilities = predictProbabilities(model, Q);
    REQUIRE(probabilities.has_value());
    for (int i = 0; i < Q.rows(); ++i) {
        CHECK(probabilities->row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(probabilities->row(i).minCoeff() >= 0.0);
    }
}

TEST_CASE("lda places the equal-prior boundary at the midpoint") {
    Matrix X(40, 1);
    Labels y(40);
    Xorshift64Star rng(43);
    for (int i = 0; i < 20; ++i) {
        X(i, 0) = -1.0 + rng.nextUniform(-0.3, 0.3);
        y[static_cast<std::size_t>(i)] = 0;
        X(20 + i, 0) = 1.0 + rng.nextUniform(-0.3, 0.3);
        y[static_cast<std::size_t>(20 + i)] = 1;
    }
    const ClassicModel model = fitClassifier(specOf(ModelKind::Lda), X, y, 2);

    // Scan for the argmax flip.
    double boundary = -2.0;
    for (double x = -2.0; x <= 2.0; x += 0.001) {
        Matrix point(1, 1);
        point << x;
        if (predictClassic(model, point)[0] == 1) {
            boundary = x;
            break;
        }
    }
    // The class means are jittered around +-1, so the midpoint sits near 0.
    CHECK(std::abs(boundary) < 0.1);
}

TEST_CASE("lda falls back to priors on identical class likelihoods") {
    // Both classes observe the same five points; class 1 has more rows.
    Matrix X(15, 1);
    Labels y(15);
    for (int i = 0; i < 5; ++i) {
        X(i, 0) = static_cast<double>(i);
        y[static_cast<std::size_t>(i)] = 0;
    }
    for (int i = 0; i < 10; ++i) {
        X(5 + i, 0) = static_cast<double>(i % 5);
        y[static_cast<std::size_t>(5 + i)] = 1;
    }
    const ClassicModel model = fitClassifier(specOf(ModelKind::Lda), X, y, 2);
    Matrix query(1, 1);
    query << 2.0;
    CHECK(predictClassic(model, query)[0] == 1);
}

TEST_CASE("lda predictions are shift-invariant") {
    Matrix X;
    Labels y;
    makeMulticlass(47, 120, 4, 3, X, y);
    const ClassicModel base = fitClassifier(specOf(ModelKind::Lda), X, y, 3);
    const Matrix shifted = X.array() + 100.0;
    const ClassicModel moved = fitClassifier(specOf(ModelKind::Lda), shifted, y, 3);

    Matrix query = X.topRows(30);
    Matrix movedQuery = shifted.topRows(30);
    CHECK(predictClassic(base, query) == predictClassic(moved, movedQuery));
}

TEST_CASE("knn memorizes exact training points at k=1") {
    Matrix X(4, 2);
    X << 0, 0, 1, 0, 0, 1, 1, 1;
    Labels y = {0, 1, 2, 3};
    CHECK(knnPredict(X, y, X, 1, 2.0, 4) == y);
}

TEST_CASE("knn matches the brute-force oracle on seeded fixtures") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Xorshift64Star rng(deriveSeed(1000, seed));
        const int n = 200;
        const int d = 5;
        Matrix trainX(n, d);
        Labels trainY(n);
        for (int i = 0; i < n; ++i) {
            trainY[static_cast<std::size_t>(i)] = static_cast<int>(rng.nextBelow(3));
            for (int c = 0; c < d; ++c) trainX(i, c) = rng.nextUniform(0, 1);
        }
        Matrix query(40, d);
        for (int i = 0; i < 40; ++i) {
            for (int c = 0; c < d; ++c) query(i, c) = rng.nextUniform(0, 1);
        }
        for (int k : {1, 3, 5}) {
            for (double p : {1.0, 2.0}) {
                CAPTURE(seed);
                CAPTURE(k);
                CAPTURE(p);
                CHECK(knnPredict(trainX, trainY, query, k, p, 3) ==
                      knnOracle(trainX, trainY, query, k, p, 3));
            }
        }
    }
}

TEST_CASE("knn tie rules prefer nearer votes, then the lower class") {
    // k=2, one neighbor per class: class 1 sits slightly nearer overall.
    Matrix X(2, 1);
    X << -1.0, 0.9;
    Labels y = {0, 1};
    Matrix query(1, 1);
    query << 0.0;
    CHECK(knnPredict(X, y, query, 2, 2.0, 2)[0] == 1);

    // Perfectly symmetric votes: the lower class index wins.
    Matrix sym(2, 1);
    sym << -1.0, 1.0;
    Labels symY = {1, 0};
    CHECK(knnPredict(sym, symY, query, 2, 2.0, 2)[0] == 0);

    // Equidistant training rows: the lower row index supplies the neighbor.
    Matrix dup(2, 1);
    dup << 1.0, 1.0;
    Labels dupY = {1, 0};
    CHECK(knnPredict(dup, dupY, query, 1, 2.0, 2)[0] == 1);
}

TEST_CASE("knn vote shares sum to one") {
    Matrix X;
    Labels y;
    makeMulticlass(53, 60, 2, 3, X, y);
    const Matrix shares = knnVoteShares(X, y, X.topRows(10), 5, 2.0, 3);
    for (int i = 0; i < shares.rows(); ++i) {
        CHECK(shares.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("naive bayes follows the dominant likelihood") {
    Matrix X(20, 1);
    Labels y(20);
    Xorshift64Star rng(59);
    for (int i = 0; i < 10; ++i) {
        X(i, 0) = rng.nextUniform(-0.5, 0.5);
        y[static_cast<std::size_t>(i)] = 0;
        X(10 + i, 0) = 10.0 + rng.nextUniform(-0.5, 0.5);
        y[static_cast<std::size_t>(10 + i)] = 1;
    }
    const ClassicModel model = fitClassifier(specOf(ModelKind::NaiveBayes), X, y, 2);
    Matrix query(1, 1);
    query << 1.0;
    CHECK(predictClassic(model, query)[0] == 0);

    const auto posteriors = predictProbabilities(model, X);
    REQUIRE(posteriors.has_value());
    for (int i = 0; i < X.rows(); ++i) {
        CHECK(posteriors->row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("naive bayes lets priors decide identical likelihoods") {
    Matrix X(12, 1);
    Labels y(12);
    for (int i = 0; i < 12; ++i) {
        X(i, 0) = static_cast<double>(i % 3);
        y[static_cast<std::size_t>(i)] = i < 3 ? 0 : 1;  // priors 1/4 vs 3/4
    }
    const ClassicModel model = fitClassifier(specOf(ModelKind::NaiveBayes), X, y, 2);
    Matrix query(1, 1);
    query << 1.0;
    CHECK(predictClassic(model, query)[0] == 1);
}

TEST_CASE("a pure-label tree is a single leaf") {
    Matrix X(5, 2);
    X.setRandom();
    Labels y = {2, 2, 2, 2, 2};
    const ClassicModel model = fitClassifier(specOf(ModelKind::DecisionTree), X, y, 3);
    const auto& tree = std::get<TreeModel>(model.params);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].leaf);
    CHECK(tree.nodes[0].label == 2);
    CHECK(predictClassic(model, X) == y);
}

TEST_CASE("the decision tree solves XOR at depth two") {
    Matrix X(4, 2);
    X << 0, 0, 0, 1, 1, 0, 1, 1;
    Labels y = {0, 1, 1, 0};
    const ClassicModel model = fitClassifier(specOf(ModelKind::DecisionTree), X, y, 2);
    CHECK(predictClassic(model, X) == y);

    // Root plus two internal children plus four leaves.
    const auto& tree = std::get<TreeModel>(model.params);
    CHECK(tree.nodes.size() == 7);
    CHECK_FALSE(tree.nodes[0].leaf);
}

TEST_CASE("a perfectly separable split yields two pure leaves") {
    Matrix X(6, 1);
    X << 1, 2, 3, 11, 12, 13;
    Labels y = {0, 0, 0, 1, 1, 1};
    const ClassicModel model = fitClassifier(specOf(ModelKind::DecisionTree), X, y, 2);
    const auto& tree = std::get<TreeModel>(model.params);
    REQUIRE(tree.nodes.size() == 3);
    CHECK_FALSE(tree.nodes[0].leaf);
    // Midpoint threshold between the closest cross-class values.
    CHECK(tree.nodes[0].threshold == doctest::Approx(7.0));
    CHECK(tree.nodes[static_cast<std::size_t>(tree.nodes[0].left)].leaf);
    CHECK(tree.nodes[static_cast<std::size_t>(tree.nodes[0].right)].leaf);
}

TEST_CASE("tree training accuracy is 1 without contradictory rows") {
    Matrix X;
    Labels y;
    makeMulticlass(61, 90, 3, 3, X, y);
    ClassifierSpec spec = specOf(ModelKind::DecisionTree);
    spec.hyper["max_depth"] = 0.0;  // unlimited
    const ClassicModel model = fitClassifier(spec, X, y, 3);
    CHECK(predictClassic(model, X) == y);
}

TEST_CASE("a one-tree forest without resampling reduces to the tree") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Matrix X;
        Labels y;
        makeMulticlass(deriveSeed(2000, seed), 80, 4, 3, X, y);

        ClassifierSpec forestSpec = specOf(ModelKind::RandomForest, seed);
        forestSpec.hyper["n_trees"] = 1.0;
        forestSpec.hyper["bootstrap"] = 0.0;
        forestSpec.hyper["feature_subsample"] = 0.0;
        const ClassicModel forest = fitClassifier(forestSpec, X, y, 3);
        const ClassicModel tree = fitClassifier(specOf(ModelKind::DecisionTree, seed), X, y, 3);

        Matrix query;
        Labels ignored;
        makeMulticlass(deriveSeed(3000, seed), 40, 4, 3, query, ignored);
        CAPTURE(seed);
        CHECK(predictClassic(forest, query) == predictClassic(tree, query));
    }
}

TEST_CASE("forests are deterministic per seed") {
    Matrix X;
    Labels y;
    makeMulticlass(67, 100, 3, 3, X, y);
    const ClassicModel a = fitClassifier(specOf(ModelKind::RandomForest, 5), X, y, 3);
    const ClassicModel b = fitClassifier(specOf(ModelKind::RandomForest, 5), X, y, 3);
    const Matrix query = X.topRows(30);
    CHECK(predictClassic(a, query) == predictClassic(b, query));

    const auto& treesA = std::get<ForestModel>(a.params).trees;
    const auto& treesB = std::get<ForestModel>(b.params).trees;
    REQUIRE(treesA.size() == 10);
    REQUIRE(treesA.size() == treesB.size());
    for (std::size_t t = 0; t < treesA.size(); ++t) {
        CHECK(treesA[t].nodes.size() == treesB[t].nodes.size());
    }
}

TEST_CASE("svm separates the symmetric two-point problem near zero") {
    Matrix X(2, 1);
    X << -1.0, 1.0;
    Labels y = {0, 1};
    const ClassicModel model = fitClassifier(specOf(ModelKind::Svm), X, y, 2);

    double boundary = -1.0;
    for (double x = -1.0; x <= 1.0; x += 0.001) {
        Matrix point(1, 1);
        point << x;
        if (predictClassic(model, point)[0] == 1) {
            boundary = x;
            break;
        }
    }
    CHECK(std::abs(boundary) < 0.05);
}

TEST_CASE("svm decision values change sign across a separable boundary") {
    Matrix X(40, 2);
    Labels y(40);
    Xorshift64Star rng(71);
    for (int i = 0; i < 20; ++i) {
        X(i, 0) = rng.nextUniform(0.0, 0.4);
        X(i, 1) = rng.nextUniform(0, 1);
        y[static_cast<std::size_t>(i)] = 0;
        X(20 + i, 0) = rng.nextUniform(0.6, 1.0);
        X(20 + i, 1) = rng.nextUniform(0, 1);
        y[static_cast<std::size_t>(20 + i)] = 1;
    }
    const ClassicModel model = fitClassifier(specOf(ModelKind::Svm), X, y, 2);
    CHECK(predictClassic(model, X) == y);
    CHECK_FALSE(predictProbabilities(model, X).has_value());
}

TEST_CASE("argmax models commute with class relabeling") {
    Matrix X;
    Labels y;
    makeMulticlass(73, 120, 4, 3, X, y);
    // Relabel classes through the permutation 0->2, 1->0, 2->1.
    const std::vector<int> perm = {2, 0, 1};
    Labels permuted(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        permuted[i] = perm[static_cast<std::size_t>(y[i])];
    }
    const Matrix query = X.topRows(40);

    for (ModelKind kind :
         {ModelKind::Logistic, ModelKind::Lda, ModelKind::NaiveBayes, ModelKind::Svm}) {
        CAPTURE(modelKindName(kind));
        const Labels base = predictClassic(fitClassifier(specOf(kind), X, y, 3), query);
        const Labels mapped =
            predictClassic(fitClassifier(specOf(kind), X, permuted, 3), query);
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(mapped[i] == perm[static_cast<std::size_t>(base[i])]);
        }
    }
}

TEST_CASE("fits are deterministic across repeated runs") {
    Matrix X;
    Labels y;
    makeMulticlass(79, 100, 4, 3, X, y);
    const Matrix query = X.bottomRows(30);
    for (ModelKind kind : {ModelKind::Logistic, ModelKind::Lda, ModelKind::Knn,
                           ModelKind::NaiveBayes, ModelKind::DecisionTree,
                           ModelKind::RandomForest, ModelKind::Svm}) {
        CAPTURE(modelKindName(kind));
        const Labels a = predictClassic(fitClassifier(specOf(kind, 9), X, y, 3), query);
        const Labels b = predictClassic(fitClassifier(specOf(kind, 9), X, y, 3), query);
        CHECK(a == b);
    }
}

TEST_CASE("degenerate label sets are rejected") {
    Matrix X(4, 1);
    X << 1, 2, 3, 4;
    Labels single = {0, 0, 0, 0};
    CHECK_THROWS_AS((void)fitClassifier(specOf(ModelKind::Logistic), X, single, 1), DataError);
    CHECK_THROWS_AS((void)fitClassifier(specOf(ModelKind::Svm), X, single, 1), DataError);

    Labels y = {0, 1, 0, 1};
    ClassifierSpec tooMany = specOf(ModelKind::Knn);
    tooMany.hyper["k"] = 10.0;
    CHECK_THROWS_AS((void)fitClassifier(tooMany, X, y, 2), ConfigError);
}
