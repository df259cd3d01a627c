#include "divkit/regression.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace divkit {

std::vector<bool> correctness_vector(const std::vector<PredictionRecord>& preds) {
    std::vector<bool> out;
    out.reserve(preds.size());
    for (const auto& p : preds) out.push_back(p.predicted_label == p.true_label);
    return out;
}

namespace {

struct ArmRates {
    std::size_t correct = 0, fp = 0, fn = 0;

    void add(const PredictionRecord& p) {
        if (p.predicted_label == p.true_label) {
            ++correct;
        } else if (p.true_label == 1) {
            ++fp;  // clean flagged as attack
        } else {
            ++fn;  // attack passed as clean
        }
    }
};

}  // namespace

RegressionReport regression_diff(const std::vector<PredictionRecord>& before,
                                 const std::vector<PredictionRecord>& after) {
    if (before.size() != after.size()) {
        throw std::invalid_argument("arms disagree on ground truth");
    }
    std::unordered_map<std::uint64_t, const PredictionRecord*> after_by_id;
    after_by_id.reserve(after.size());
    for (const auto& p : after) {
        if (!after_by_id.emplace(p.demand_id, &p).second) {
            throw std::invalid_argument("arms disagree on ground truth");
        }
    }

    RegressionReport rep;
    rep.n = before.size();
    ArmRates b_rates, a_rates;
    std::unordered_set<std::uint64_t> matched;
    matched.reserve(before.size());
    for (const auto& b : before) {
        auto it = after_by_id.find(b.demand_id);
        if (it == after_by_id.end() || it->second->true_label != b.true_label ||
            !matched.insert(b.demand_id).second) {
            throw std::invalid_argument("arms disagree on ground truth");
        }
        const PredictionRecord& a = *it->second;
        b_rates.add(b);
        a_rates.add(a);
        bool correct_before = b.predicted_label == b.true_label;
        bool correct_after = a.predicted_label == a.true_label;
        if (correct_before && !correct_after) {
            ++rep.regressed;
            rep.regressed_ids.push_back(b.demand_id);
        } else if (!correct_before && correct_after) {
            ++rep.repaired;
            rep.repaired_ids.push_back(b.demand_id);
        }
    }
    std::sort(rep.regressed_ids.begin(), rep.regressed_ids.end());
    std::sort(rep.repaired_ids.begin(), rep.repaired_ids.end());

    const double n = static_cast<double>(rep.n);
    rep.acc_before = static_cast<double>(b_rates.correct) / n;
    rep.fp_before = static_cast<double>(b_rates.fp) / n;
    rep.fn_before = static_cast<double>(b_rates.fn) / n;
    rep.acc_after = static_cast<double>(a_rates.correct) / n;
    rep.fp_after = static_cast<double>(a_rates.fp) / n;
    rep.fn_after = static_cast<double>(a_rates.fn) / n;
    return rep;
}

std::vector<PredictionRecord> ordered_records(const std::vector<PredictionRecord>& preds) {
    std::vector<PredictionRecord> out = preds;
    std::sort(out.begin(), out.end(), [](const PredictionRecord& x, const PredictionRecord& y) {
        if (x.score != y.score) return x.score < y.score;
        return x.demand_id < y.demand_id;
    });
    return out;
}

std::vector<std::pair<std::size_t, double>> ordered_scores(
    const std::vector<PredictionRecord>& preds) {
    std::vector<PredictionRecord> order = ordered_records(preds);
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(order.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        out.emplace_back(rank, order[rank].score);
    }
    return out;
}

std::vector<PredictionRecord> predict_records(const ScorerParams& p, const LabeledDataset& ds,
                                              double threshold) {
    std::vector<PredictionRecord> out;
    out.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double s = score(p, ds.demands[i]);
        out.push_back({ds.demands[i].id, s, s > threshold ? 1 : 0, ds.labels[i]});
    }
    return out;
}

namespace {

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
    LabeledDataset out = a;
    out.demands.insert(out.demands.end(), b.demands.begin(), b.demands.end());
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    return out;
}

}  // namespace

RetrainingOutcome retraining_experiment(const LabeledDataset& ds, const TrainConfig& cfg,
                                        const SplitSpec& spec, double threshold,
                                        bool fresh_retrain) {
    if (spec.fractions.size() != 3) {
        throw std::invalid_argument("retraining protocol needs a three-part split");
    }
    std::vector<LabeledDataset> parts = split_dataset(ds, spec);
    for (const auto& p : parts) {
        if (p.empty()) throw std::invalid_argument("split produced an empty part");
    }

    ScorerParams before_params = train(parts[0], cfg);
    LabeledDataset combined = concat(parts[0], parts[1]);
    ScorerParams after_params =
        fresh_retrain ? train(combined, cfg) : retrain(before_params, combined, cfg);

    RetrainingOutcome out;
    out.before = predict_records(before_params, parts[2], threshold);
    out.after = predict_records(after_params, parts[2], threshold);
    out.report = regression_diff(out.before, out.after);
    return out;
}

}  // namespace divkit
