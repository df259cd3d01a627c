#pragma once
// Difficulty-driven cascade ensemble: a chain of scorers where each model is
// trained only on the demands its predecessor scored inside the confidence
// range [a, b], plus the adjudicator that walks the chain at prediction time.

#include <cstdint>
#include <vector>

#include "divkit/dataset.hpp"
#include "divkit/scorer.hpp"

namespace divkit {

struct PartitionResult {
    LabeledDataset easy;       // score < a or score > b
    LabeledDataset difficult;  // a <= score <= b (boundary scores are difficult)
};

// Splits ds by the closed-interval rule against p's scores. Order within each
// part preserves ds order.
PartitionResult partition_by_confidence(const ScorerParams& p, const LabeledDataset& ds,
                                        const ScoreRange& r);

struct CascadeEnsemble {
    std::vector<ScorerParams> models;  // Model 0, Model 1, ...
    ScoreRange range;
    double final_tie_threshold = 0.5;
};

struct CascadeDecision {
    int label = 0;
    std::size_t deciding_model = 0;
    double deciding_score = 0.0;  // raw score of the deciding model
};

// Walks scores in model order: score < a decides 0, score > b decides 1, an
// in-range score defers to the next model. The last model's in-range score is
// binarized at final_tie_threshold (ties to 0) with the raw score preserved.
CascadeDecision adjudicate(const std::vector<double>& scores, const ScoreRange& r,
                           double final_tie_threshold);

// Lazy evaluation: model k+1 is scored only if model k was in range.
// Observationally identical to scoring every model and adjudicating.
CascadeDecision cascade_predict(const CascadeEnsemble& e, const Demand& d);

struct CascadeBuildResult {
    CascadeEnsemble ensemble;
    LabeledDataset holdout;  // untouched 50% of the available data
    std::size_t requested_depth = 0;
    bool truncated = false;  // stopped early on an empty or single-class difficult subset
    std::vector<std::vector<std::uint64_t>> stage_training_ids;  // per model, in training order
};

// Splits `available` 50/50 (seeded) into a construction half and a holdout,
// trains Model 0 on the construction half, then repeatedly partitions the
// current training set and trains the next model on the difficult subset
// only, stopping after `depth` models or when the difficult subset is empty
// or single-class (a flagged truncation, not an error).
CascadeBuildResult build_cascade(const LabeledDataset& available, std::size_t depth,
                                 const ScoreRange& r, const TrainConfig& cfg,
                                 std::uint64_t seed);

struct CascadeMetrics {
    std::size_t n = 0;
    double accuracy = 0.0;
    double fp_rate = 0.0;  // clean (label 1) flagged as attack (0), over n
    double fn_rate = 0.0;  // attack (label 0) passed as clean (1), over n
    std::vector<std::size_t> decided_count;  // demands decided per model
    std::vector<double> decided_accuracy;    // conditional accuracy per model (0 when count 0)
    double model0_accuracy = 0.0;  // Model 0 alone at the final tie threshold
};

CascadeMetrics evaluate_cascade(const CascadeEnsemble& e, const LabeledDataset& ds);

}  // namespace divkit
