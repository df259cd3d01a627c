#pragma once
// Deterministic trainable binary scorer emitting confidence scores in [0,1].
// A logistic model trained by full-batch gradient descent: the smallest
// differentiable scorer with the score semantics the rest of the toolkit
// needs (score near 1 = confidently clean, near 0 = confidently malicious).

#include <cstdint>
#include <vector>

#include "divkit/dataset.hpp"

namespace divkit {

struct ScorerParams {
    std::vector<double> weights;  // length = feature dimensionality
    double bias = 0.0;

    std::size_t dimensionality() const { return weights.size(); }
};

struct TrainConfig {
    double learning_rate = 0.1;
    int epochs = 300;
    double l2_penalty = 1e-4;  // applied to weights, not the bias
    std::uint64_t init_seed = 0;
};

bool train_config_valid(const TrainConfig& cfg);

// Numerically stable logistic function.
double sigmoid(double z);

// sigmoid(weights . features + bias). Throws on dimensionality mismatch.
double score(const ScorerParams& p, const Demand& d);

// 1 if score > threshold, else 0. Ties at the threshold go to 0 (the
// malicious class).
int classify(const ScorerParams& p, const Demand& d, double threshold = 0.5);

// Mean L2-regularized cross-entropy of the sigmoid score against labels.
double loss(const ScorerParams& p, const LabeledDataset& ds, double l2_penalty);

struct LossGradient {
    std::vector<double> d_weights;
    double d_bias = 0.0;
};

LossGradient loss_gradient(const ScorerParams& p, const LabeledDataset& ds, double l2_penalty);

// Full-batch gradient descent from a small seeded symmetric initialization.
// Deterministic in (ds, cfg).
ScorerParams train(const LabeledDataset& ds, const TrainConfig& cfg);

// Warm start: continues gradient descent from p for cfg.epochs more steps.
// cfg.init_seed is ignored (no re-initialization).
ScorerParams retrain(const ScorerParams& p, const LabeledDataset& ds, const TrainConfig& cfg);

}  // namespace divkit
