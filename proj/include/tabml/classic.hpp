#pragma once

#include <tabml/rng.hpp>
#include <tabml/types.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tabml {

// The eight model kinds. The first seven share the ClassicModel contract;
// Neural lives in neural.hpp and joins the roster at the pipeline level.
enum class ModelKind {
    Logistic,
    Lda,
    Knn,
    NaiveBayes,
    DecisionTree,
    RandomForest,
    Svm,
    Neural,
};

const std::string& modelKindName(ModelKind kind);
ModelKind modelKindFromName(const std::string& name);

// Model request: kind, kind-specific hyperparameters, and the seed for any
// stochastic part of training. Unknown hyperparameter keys are rejected;
// every key has a documented default (see hyperparameterDefaults).
struct ClassifierSpec {
    ModelKind kind = ModelKind::Logistic;
    std::map<std::string, double> hyper;
    std::uint64_t seed = 0;
};

// The documented default hyperparameters for a kind.
const std::map<std::string, double>& hyperparameterDefaults(ModelKind kind);

// --- Learned parameter sets ------------------------------------------------

// Multinomial logistic regression: per-class weight rows and biases.
struct LogisticModel {
    Matrix weights;  // C x d
    Vector bias;     // C
};

// Linear discriminant scores: score_c = x . coef_c + intercept_c.
struct LdaModel {
    Matrix coef;       // C x d
    Vector intercept;  // C
};

// KNN memorizes its training set.
struct KnnModel {
    Matrix trainX;
    Labels trainY;
    int k = 5;
    double p = 2.0;
    int nClasses = 0;
};

// Gaussian class-conditional statistics.
struct NaiveBayesModel {
    Matrix means;      // C x d
    Matrix variances;  // C x d, floored at 1e-9
    Vector logPriors;  // C
};

// Flat tree arena; children referenced by index. Internal nodes route
// x[feature] <= threshold to the left child.
struct TreeNode {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
    std::vector<double> histogram;  // per-class training counts at the node
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int nClasses = 0;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    int nClasses = 0;
};

// One-vs-rest linear SVM: decision_c = x . weights_c + bias_c.
struct SvmModel {
    Matrix weights;  // C x d
    Vector bias;     // C
};

struct ClassicModel {
    ModelKind kind = ModelKind::Logistic;
    std::variant<LogisticModel, LdaModel, KnnModel, NaiveBayesModel, TreeModel, ForestModel,
                 SvmModel>
        params;
};

// --- Training and prediction ------------------------------------------------

// Dispatches on spec.kind. Labels must lie in [0, nClasses).
ClassicModel fitClassifier(const ClassifierSpec& spec, const Matrix& X, const Labels& y,
                           int nClasses);

// Predicted class indices, one per row. Argmax and vote ties resolve to the
// lower class index (KNN vote ties prefer the tied class with the smaller
// summed neighbor distance first).
Labels predictClassic(const ClassicModel& model, const Matrix& X);

// Per-class scores in [0,1] summing to 1 per row, where the model defines
// them: softmax probabilities (logistic), Gaussian posteriors (LDA, naive
// Bayes), leaf histogram shares (tree), tree vote shares (forest), neighbor
// vote shares (KNN). SVM margins are not probabilities, so SVM returns
// nullopt.
std::optional<Matrix> predictProbabilities(const ClassicModel& model, const Matrix& X);

// Minkowski-p distance (sum |a_i - b_i|^p)^(1/p), p >= 1.
double minkowskiDistance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                         const Eigen::Ref<const Eigen::RowVectorXd>& b, double p);

// Stateless KNN: per query row, majority label among the k nearest training
// rows by Minkowski-p distance. Distance ties prefer the lower training-row
// index.
Labels knnPredict(const Matrix& trainX, const Labels& trainY, const Matrix& query, int k,
                  double p, int nClasses);

// Per-class neighbor vote shares (rows sum to 1).
Matrix knnVoteShares(const Matrix& trainX, const Labels& trainY, const Matrix& query, int k,
                     double p, int nClasses);

// Decision tree growth, shared by the single tree and the forest. When
// featureSubsample > 0, each split draws that many distinct candidate
// features from `rng`; rows may repeat (bootstrap samples). maxDepth 0 means
// unlimited.
TreeModel growTree(const Matrix& X, const Labels& y, const std::vector<std::size_t>& rows,
                   int nClasses, std::size_t maxDepth, std::size_t minSplit,
                   std::size_t featureSubsample, Xorshift64Star* rng);

}  // namespace tabml
