#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "budgetal/dataset.hpp"

namespace budgetal::learn {

struct LearnerConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 200;
    double l2_penalty = 1e-4;
    std::uint64_t seed = 0;
};

/// Multinomial logistic classifier trained by full-batch gradient descent
/// from zero initialization. Training is a pure function of
/// (data subset, config); models are immutable afterwards.
struct SoftmaxModel {
    std::size_t num_classes = 0;
    std::size_t dim = 0;
    std::vector<double> weights;  // C x d, row per class
    std::vector<double> bias;     // C
    LearnerConfig config;
};

SoftmaxModel train(const Dataset& dataset, const IndexSet& subset,
                   const LearnerConfig& config);

std::vector<double> predict_proba(const SoftmaxModel& model,
                                  std::span<const double> features);

/// Fraction of argmax-correct predictions on `subset`; argmax ties resolve
/// to the lowest class index.
double accuracy(const SoftmaxModel& model, const Dataset& dataset,
                const IndexSet& subset);

/// (softmax(Wx+b) - onehot(argmax)) (x) x, flattened class-major: the
/// hallucinated-label loss gradient used for diversity-aware selection.
std::vector<double> gradient_embedding(const SoftmaxModel& model,
                                       std::span<const double> features);

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> weight_grad;  // C x d
    std::vector<double> bias_grad;    // C
};

/// Mean cross-entropy plus 0.5 * l2 * ||W||^2 and its exact gradient.
LossAndGradient loss_and_gradient(const SoftmaxModel& model, const Dataset& dataset,
                                  const IndexSet& subset);

}  // namespace budgetal::learn
