#pragma once
// Regression-fault analysis: diff a model's per-item correctness before and
// after retraining. An item counted as "regressed" was classified correctly
// by the before arm and incorrectly by the after arm; "repaired" is the
// reverse transition.
//
// Rate orientation used throughout: an attack is label 0, so
//   FP = fraction of items with true label 1 predicted 0 (spurious attack flag)
//   FN = fraction of items with true label 0 predicted 1 (missed attack)
// both normalized by the test-set size n.

#include <cstdint>
#include <utility>
#include <vector>

#include "divkit/dataset.hpp"
#include "divkit/scorer.hpp"

namespace divkit {

struct PredictionRecord {
    std::uint64_t demand_id = 0;
    double score = 0.0;
    int predicted_label = 0;
    int true_label = 0;
};

std::vector<bool> correctness_vector(const std::vector<PredictionRecord>& preds);

struct RegressionReport {
    std::size_t n = 0;
    double acc_before = 0.0, acc_after = 0.0;
    double fp_before = 0.0, fn_before = 0.0;
    double fp_after = 0.0, fn_after = 0.0;
    std::size_t regressed = 0;  // correct before, incorrect after
    std::size_t repaired = 0;   // incorrect before, correct after
    std::vector<std::uint64_t> regressed_ids;  // ascending demand id
    std::vector<std::uint64_t> repaired_ids;
};

// Aligns the arms by demand_id and counts correctness transitions. Throws
// "arms disagree on ground truth" when the id sets or true labels differ.
RegressionReport regression_diff(const std::vector<PredictionRecord>& before,
                                 const std::vector<PredictionRecord>& after);

// Records sorted by ascending score, ties kept in demand-id order.
std::vector<PredictionRecord> ordered_records(const std::vector<PredictionRecord>& preds);

// The (rank, score) view of ordered_records; ranks start at 0.
std::vector<std::pair<std::size_t, double>> ordered_scores(
    const std::vector<PredictionRecord>& preds);

struct RetrainingOutcome {
    RegressionReport report;
    std::vector<PredictionRecord> before;  // test-part predictions, both arms
    std::vector<PredictionRecord> after;
};

// The three-part retraining protocol: train on part 1, evaluate on part 3,
// warm-start retrain on parts 1+2, re-evaluate on part 3, diff the arms.
// With fresh_retrain the after arm trains from scratch on parts 1+2 instead
// of continuing from the before-arm parameters.
RetrainingOutcome retraining_experiment(const LabeledDataset& ds, const TrainConfig& cfg,
                                        const SplitSpec& spec, double threshold,
                                        bool fresh_retrain = false);

// Per-demand prediction records for a scorer over a dataset.
std::vector<PredictionRecord> predict_records(const ScorerParams& p, const LabeledDataset& ds,
                                              double threshold);

}  // namespace divkit
