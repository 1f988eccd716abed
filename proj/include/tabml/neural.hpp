#pragma once

#include <tabml/types.hpp>

#include <cstdint>
#include <vector>

namespace tabml {

// Feedforward network shape and training settings. An empty hiddenLayers
// list selects the default stack: six layers, each of width
// ceil((inputDim + outputDim) / 2).
struct NetworkConfig {
    std::size_t inputDim = 0;
    std::size_t outputDim = 0;
    std::vector<std::size_t> hiddenLayers;
    double learningRate = 0.01;
    std::size_t epochs = 100;
    std::size_t batchSize = 32;
    std::uint64_t seed = 0;
};

std::vector<std::size_t> defaultHiddenLayers(std::size_t inputDim, std::size_t outputDim);

// Per-layer parameters; weights[l] is (width_l x width_{l-1}).
struct NetworkParams {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

// Weights uniform in (-sqrt(6/fan_in), +sqrt(6/fan_in)), filled row by row
// from the seeded stream; biases zero.
NetworkParams initNetwork(const NetworkConfig& config);

// Hidden layers apply ReLU(W a + b); the output layer applies softmax with
// per-row max subtraction. activations[0] is the input batch and
// activations[l] the l-th hidden output; logits are the pre-softmax outputs.
struct ForwardPass {
    Matrix probabilities;
    Matrix logits;
    std::vector<Matrix> activations;
};

ForwardPass forward(const NetworkParams& params, const Matrix& X);

// Mean categorical cross-entropy of the batch, computed from logits via
// log-sum-exp for stability.
double crossEntropyLoss(const Matrix& logits, const Matrix& yOneHot);

// Backpropagation gradients of the mean cross-entropy over the batch.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

Gradients backprop(const NetworkParams& params, const ForwardPass& pass, const Matrix& yOneHot);

// Mini-batch gradient descent with a seeded per-epoch shuffle. Returns the
// trained parameters and the per-epoch mean training loss. Throws
// NumericError naming the epoch when the loss stops being finite.
struct TrainResult {
    NetworkParams params;
    std::vector<double> epochLosses;
};

TrainResult trainNetwork(NetworkParams params, const Matrix& X, const Matrix& yOneHot,
                         const NetworkConfig& config);

// Max relative error between backprop gradients and central finite
// differences (L(t+e) - L(t-e)) / 2e, with denominator max(|g|, |fd|, 1e-8).
double gradientCheck(const NetworkParams& params, const Matrix& X, const Matrix& yOneHot,
                     double epsilon);

// Argmax of forward probabilities per row; ties to the lower class index.
Labels predictNetwork(const NetworkParams& params, const Matrix& X);

// One-hot target matrix for integer labels in [0, nClasses).
Matrix oneHot(const Labels& y, int nClasses);

}  // namespace tabml
