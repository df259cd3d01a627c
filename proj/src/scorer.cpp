#include "divkit/scorer.hpp"

#include <cmath>
#include <stdexcept>

#include "divkit/rng.hpp"

namespace divkit {
namespace {

// log(1 + e^z) without overflow.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double linear_term(const ScorerParams& p, const std::vector<double>& features) {
    double z = p.bias;
    for (std::size_t j = 0; j < features.size(); ++j) z += p.weights[j] * features[j];
    return z;
}

void check_trainable(const ScorerParams& p, const LabeledDataset& ds) {
    if (ds.empty()) throw std::invalid_argument("empty dataset");
    if (ds.dimensionality != p.dimensionality()) {
        throw std::invalid_argument("dimensionality mismatch");
    }
    for (const Demand& d : ds.demands) {
        if (d.features.size() != ds.dimensionality) {
            throw std::invalid_argument("invalid features");
        }
        for (double v : d.features) {
            if (!std::isfinite(v)) throw std::invalid_argument("invalid features");
        }
    }
}

ScorerParams descend(ScorerParams p, const LabeledDataset& ds, const TrainConfig& cfg) {
    check_trainable(p, ds);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        LossGradient g = loss_gradient(p, ds, cfg.l2_penalty);
        for (std::size_t j = 0; j < p.weights.size(); ++j) {
            p.weights[j] -= cfg.learning_rate * g.d_weights[j];
        }
        p.bias -= cfg.learning_rate * g.d_bias;
    }
    return p;
}

}  // namespace

bool train_config_valid(const TrainConfig& cfg) {
    return cfg.learning_rate > 0.0 && std::isfinite(cfg.learning_rate) && cfg.epochs >= 1 &&
           cfg.l2_penalty >= 0.0 && std::isfinite(cfg.l2_penalty);
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double score(const ScorerParams& p, const Demand& d) {
    if (d.features.size() != p.dimensionality()) {
        throw std::invalid_argument("dimensionality mismatch");
    }
    return sigmoid(linear_term(p, d.features));
}

int classify(const ScorerParams& p, const Demand& d, double threshold) {
    if (threshold < 0.0 || threshold > 1.0) {
        throw std::invalid_argument("threshold outside [0, 1]");
    }
    return score(p, d) > threshold ? 1 : 0;
}

double loss(const ScorerParams& p, const LabeledDataset& ds, double l2_penalty) {
    if (ds.empty()) throw std::invalid_argument("empty dataset");
    const double n = static_cast<double>(ds.size());
    double total = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        // -[y log s + (1-y) log(1-s)] = softplus(z) - y z
        double z = linear_term(p, ds.demands[i].features);
        total += softplus(z) - static_cast<double>(ds.labels[i]) * z;
    }
    double reg = 0.0;
    for (double w : p.weights) reg += w * w;
    return total / n + 0.5 * l2_penalty * reg;
}

LossGradient loss_gradient(const ScorerParams& p, const LabeledDataset& ds, double l2_penalty) {
    if (ds.empty()) throw std::invalid_argument("empty dataset");
    const double n = static_cast<double>(ds.size());
    LossGradient g;
    g.d_weights.assign(p.weights.size(), 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double residual = sigmoid(linear_term(p, ds.demands[i].features)) -
                          static_cast<double>(ds.labels[i]);
        const auto& x = ds.demands[i].features;
        for (std::size_t j = 0; j < x.size(); ++j) g.d_weights[j] += residual * x[j];
        g.d_bias += residual;
    }
    for (std::size_t j = 0; j < p.weights.size(); ++j) {
        g.d_weights[j] = g.d_weights[j] / n + l2_penalty * p.weights[j];
    }
    g.d_bias /= n;
    return g;
}

ScorerParams train(const LabeledDataset& ds, const TrainConfig& cfg) {
    if (ds.empty()) throw std::invalid_argument("empty dataset");
    if (!train_config_valid(cfg)) throw std::invalid_argument("invalid train config");

    // Symmetric small-magnitude initialization, seeded.
    ScorerParams p;
    p.weights.resize(ds.dimensionality);
    Rng rng(mix_key(cfg.init_seed, rng_tag::init));
    for (double& w : p.weights) w = (rng.next_unit() - 0.5) * 0.02;
    p.bias = (rng.next_unit() - 0.5) * 0.02;

    return descend(std::move(p), ds, cfg);
}

ScorerParams retrain(const ScorerParams& p, const LabeledDataset& ds, const TrainConfig& cfg) {
    if (!train_config_valid(cfg)) throw std::invalid_argument("invalid train config");
    return descend(p, ds, cfg);
}

}  // namespace divkit
