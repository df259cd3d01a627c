#pragma once
// JSON and CSV codecs for every persisted type, plus the canonical JSON
// writer used for report bodies: keys sorted, floats at 17 significant
// digits, so identical results serialize to identical bytes.

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "divkit/cascade.hpp"
#include "divkit/channels.hpp"
#include "divkit/dataset.hpp"
#include "divkit/diversity.hpp"
#include "divkit/regression.hpp"
#include "divkit/scorer.hpp"

namespace divkit {

using json = nlohmann::json;

// Deterministic serialization: object keys in sorted order, floating-point
// numbers formatted with %.17g (round-trips every double exactly), 2-space
// indentation, LF line endings. Throws on non-finite numbers.
std::string canonical_dump(const json& j);

// Formats one double the way canonical_dump does.
std::string format_double(double v);

// ScorerParams <-> {"dim": n, "weights": [...], "bias": x}
json to_json(const ScorerParams& p);
ScorerParams scorer_params_from_json(const json& j);

// CascadeEnsemble <-> {"range": {"a","b"}, "final_tie_threshold", "models": [...]}
json to_json(const CascadeEnsemble& e);
CascadeEnsemble ensemble_from_json(const json& j);

json to_json(const RegressionReport& r);
json to_json(const CascadeMetrics& m);
json to_json(const JointFailureTable& t);
json to_json(const ImprovementFactor& f);  // marker serializes as a string
json to_json(const PopulationCurvePoint& p);
json to_json(const PairStats& s);
json to_json(const TrustedCheckerStats& s);
json to_json(const RouterMetrics& m);

// Dataset CSV: header `id,f0,...,f{d-1},label`, UTF-8, LF line endings.
std::string dataset_to_csv(const LabeledDataset& ds);
void save_dataset_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset dataset_from_csv_text(const std::string& text);
LabeledDataset load_dataset_csv(const std::string& path);

// Ordered-score export: exactly two columns, `rank,score`, rank from 0.
std::string ordered_scores_csv(const std::vector<std::pair<std::size_t, double>>& ranked);

// Diversity curve export, one row per profile point.
std::string curve_csv(const std::vector<PopulationCurvePoint>& points);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace divkit
