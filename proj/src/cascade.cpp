#include "divkit/cascade.hpp"

#include <stdexcept>

#include "divkit/rng.hpp"

namespace divkit {

PartitionResult partition_by_confidence(const ScorerParams& p, const LabeledDataset& ds,
                                        const ScoreRange& r) {
    if (!score_range_valid(r)) throw std::invalid_argument("invalid score range");
    PartitionResult out;
    out.easy.dimensionality = ds.dimensionality;
    out.difficult.dimensionality = ds.dimensionality;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double s = score(p, ds.demands[i]);
        LabeledDataset& part = (s >= r.a && s <= r.b) ? out.difficult : out.easy;
        part.demands.push_back(ds.demands[i]);
        part.labels.push_back(ds.labels[i]);
    }
    return out;
}

CascadeDecision adjudicate(const std::vector<double>& scores, const ScoreRange& r,
                           double final_tie_threshold) {
    if (scores.empty()) throw std::invalid_argument("no scores to adjudicate");
    if (!score_range_valid(r)) throw std::invalid_argument("invalid score range");
    for (std::size_t k = 0; k < scores.size(); ++k) {
        double s = scores[k];
        if (s < r.a) return {0, k, s};
        if (s > r.b) return {1, k, s};
        if (k + 1 == scores.size()) {
            // Demand too difficult for every model; binarize the final score.
            return {s > final_tie_threshold ? 1 : 0, k, s};
        }
        // In range: too difficult for model k, consult model k+1.
    }
    return {};  // unreachable
}

CascadeDecision cascade_predict(const CascadeEnsemble& e, const Demand& d) {
    if (e.models.empty()) throw std::invalid_argument("ensemble has no models");
    if (!score_range_valid(e.range)) throw std::invalid_argument("invalid score range");
    for (std::size_t k = 0; k < e.models.size(); ++k) {
        double s = score(e.models[k], d);
        if (s < e.range.a) return {0, k, s};
        if (s > e.range.b) return {1, k, s};
        if (k + 1 == e.models.size()) {
            return {s > e.final_tie_threshold ? 1 : 0, k, s};
        }
    }
    return {};  // unreachable
}

namespace {

bool single_class(const LabeledDataset& ds) {
    for (std::size_t i = 1; i < ds.size(); ++i) {
        if (ds.labels[i] != ds.labels[0]) return false;
    }
    return true;
}

std::vector<std::uint64_t> ids_of(const LabeledDataset& ds) {
    std::vector<std::uint64_t> ids;
    ids.reserve(ds.size());
    for (const Demand& d : ds.demands) ids.push_back(d.id);
    return ids;
}

}  // namespace

CascadeBuildResult build_cascade(const LabeledDataset& available, std::size_t depth,
                                 const ScoreRange& r, const TrainConfig& cfg,
                                 std::uint64_t seed) {
    if (depth < 1) throw std::invalid_argument("depth must be at least 1");
    if (available.size() < 2) throw std::invalid_argument("dataset too small to split");
    if (!score_range_valid(r)) throw std::invalid_argument("invalid score range");

    SplitSpec half{{0.5, 0.5}, seed};
    std::vector<LabeledDataset> halves = split_dataset(available, half);

    CascadeBuildResult out;
    out.requested_depth = depth;
    out.holdout = std::move(halves[1]);
    out.ensemble.range = r;

    LabeledDataset current = std::move(halves[0]);
    for (std::size_t k = 0; k < depth; ++k) {
        if (k > 0) {
            PartitionResult parts =
                partition_by_confidence(out.ensemble.models[k - 1], current, r);
            if (parts.difficult.empty() || single_class(parts.difficult)) {
                out.truncated = true;
                break;
            }
            current = std::move(parts.difficult);
        }
        TrainConfig stage_cfg = cfg;
        stage_cfg.init_seed = mix_key(cfg.init_seed, rng_tag::stage, k);
        out.ensemble.models.push_back(train(current, stage_cfg));
        out.stage_training_ids.push_back(ids_of(current));
    }
    return out;
}

CascadeMetrics evaluate_cascade(const CascadeEnsemble& e, const LabeledDataset& ds) {
    if (ds.empty()) throw std::invalid_argument("empty dataset");
    if (e.models.empty()) throw std::invalid_argument("ensemble has no models");

    CascadeMetrics m;
    m.n = ds.size();
    m.decided_count.assign(e.models.size(), 0);
    std::vector<std::size_t> decided_correct(e.models.size(), 0);

    std::size_t correct = 0, fp = 0, fn = 0, model0_correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CascadeDecision dec = cascade_predict(e, ds.demands[i]);
        int truth = ds.labels[i];
        ++m.decided_count[dec.deciding_model];
        if (dec.label == truth) {
            ++correct;
            ++decided_correct[dec.deciding_model];
        } else if (truth == 1) {
            ++fp;  // clean item flagged as attack
        } else {
            ++fn;  // attack item passed as clean
        }
        if (classify(e.models[0], ds.demands[i], e.final_tie_threshold) == truth) {
            ++model0_correct;
        }
    }

    const double n = static_cast<double>(m.n);
    m.accuracy = static_cast<double>(correct) / n;
    m.fp_rate = static_cast<double>(fp) / n;
    m.fn_rate = static_cast<double>(fn) / n;
    m.model0_accuracy = static_cast<double>(model0_correct) / n;
    m.decided_accuracy.assign(e.models.size(), 0.0);
    for (std::size_t k = 0; k < e.models.size(); ++k) {
        if (m.decided_count[k] > 0) {
            m.decided_accuracy[k] = static_cast<double>(decided_correct[k]) /
                                    static_cast<double>(m.decided_count[k]);
        }
    }
    return m;
}

}  // namespace divkit
