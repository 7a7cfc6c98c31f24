#include "budgetal/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace budgetal::learn {

namespace {

void softmax_inplace(std::vector<double>& logits) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (auto& z : logits) {
        z = std::exp(z - peak);
        sum += z;
    }
    for (auto& z : logits) z /= sum;
}

std::vector<double> logits_for(const SoftmaxModel& model,
                               std::span<const double> x) {
    if (x.size() != model.dim)
        throw std::invalid_argument("predict: feature dimension mismatch");
    std::vector<double> z(model.num_classes, 0.0);
    for (std::size_t c = 0; c < model.num_classes; ++c) {
        double acc = model.bias[c];
        const double* w = model.weights.data() + c * model.dim;
        for (std::size_t j = 0; j < model.dim; ++j) acc += w[j] * x[j];
        z[c] = acc;
    }
    return z;
}

std::size_t argmax_lowest(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

LossAndGradient loss_and_gradient(const SoftmaxModel& model, const Dataset& dataset,
                                  const IndexSet& subset) {
    if (subset.empty())
        throw std::invalid_argument("loss_and_gradient: subset is empty");
    const std::size_t C = model.num_classes;
    const std::size_t d = model.dim;
    LossAndGradient out;
    out.weight_grad.assign(C * d, 0.0);
    out.bias_grad.assign(C, 0.0);

    const double inv_n = 1.0 / static_cast<double>(subset.size());
    for (std::size_t idx : subset) {
        const auto x = dataset.row(idx);
        auto probs = logits_for(model, x);
        softmax_inplace(probs);
        const auto y = static_cast<std::size_t>(dataset.label(idx));
        out.loss -= inv_n * std::log(std::max(probs[y], 1e-300));
        for (std::size_t c = 0; c < C; ++c) {
            const double delta = (probs[c] - (c == y ? 1.0 : 0.0)) * inv_n;
            out.bias_grad[c] += delta;
            double* g = out.weight_grad.data() + c * d;
            for (std::size_t j = 0; j < d; ++j) g[j] += delta * x[j];
        }
    }
    const double l2 = model.config.l2_penalty;
    if (l2 > 0.0) {
        double sq = 0.0;
        for (std::size_t k = 0; k < C * d; ++k) {
            sq += model.weights[k] * model.weights[k];
            out.weight_grad[k] += l2 * model.weights[k];
        }
        out.loss += 0.5 * l2 * sq;
    }
    return out;
}

SoftmaxModel train(const Dataset& dataset, const IndexSet& subset,
                   const LearnerConfig& config) {
    if (subset.empty()) throw std::invalid_argument("train: subset is empty");
    SoftmaxModel model;
    model.num_classes = dataset.num_classes();
    model.dim = dataset.dim();
    model.weights.assign(model.num_classes * model.dim, 0.0);
    model.bias.assign(model.num_classes, 0.0);
    model.config = config;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto g = loss_and_gradient(model, dataset, subset);
        for (std::size_t k = 0; k < model.weights.size(); ++k)
            model.weights[k] -= config.learning_rate * g.weight_grad[k];
        for (std::size_t c = 0; c < model.bias.size(); ++c)
            model.bias[c] -= config.learning_rate * g.bias_grad[c];
    }
    return model;
}

std::vector<double> predict_proba(const SoftmaxModel& model,
                                  std::span<const double> features) {
    auto probs = logits_for(model, features);
    softmax_inplace(probs);
    return probs;
}

double accuracy(const SoftmaxModel& model, const Dataset& dataset,
                const IndexSet& subset) {
    if (subset.empty()) throw std::invalid_argument("accuracy: subset is empty");
    std::size_t correct = 0;
    for (std::size_t idx : subset) {
        const auto probs = predict_proba(model, dataset.row(idx));
        if (argmax_lowest(probs) == static_cast<std::size_t>(dataset.label(idx)))
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(subset.size());
}

std::vector<double> gradient_embedding(const SoftmaxModel& model,
                                       std::span<const double> features) {
    const auto probs = predict_proba(model, features);
    const std::size_t predicted = argmax_lowest(probs);
    std::vector<double> g(model.num_classes * model.dim);
    for (std::size_t c = 0; c < model.num_classes; ++c) {
        const double delta = probs[c] - (c == predicted ? 1.0 : 0.0);
        for (std::size_t j = 0; j < model.dim; ++j)
            g[c * model.dim + j] = delta * features[j];
    }
    return g;
}

}  // namespace budgetal::learn
