#include "divkit/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace divkit {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite number in output");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void dump_rec(const json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                out += json(it.key()).dump();
                out += ": ";
                dump_rec(it.value(), out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& item : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_rec(item, out, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();  // integers, strings, booleans, null
            return;
    }
}

}  // namespace

std::string canonical_dump(const json& j) {
    std::string out;
    dump_rec(j, out, 0);
    out += "\n";
    return out;
}

json to_json(const ScorerParams& p) {
    return json{{"dim", p.dimensionality()}, {"weights", p.weights}, {"bias", p.bias}};
}

ScorerParams scorer_params_from_json(const json& j) {
    ScorerParams p;
    p.weights = j.at("weights").get<std::vector<double>>();
    p.bias = j.at("bias").get<double>();
    if (j.at("dim").get<std::size_t>() != p.weights.size()) {
        throw std::invalid_argument("scorer dim does not match weights length");
    }
    for (double w : p.weights) {
        if (!std::isfinite(w)) throw std::invalid_argument("non-finite scorer weight");
    }
    if (!std::isfinite(p.bias)) throw std::invalid_argument("non-finite scorer bias");
    return p;
}

json to_json(const CascadeEnsemble& e) {
    json models = json::array();
    for (const auto& m : e.models) models.push_back(to_json(m));
    return json{{"range", {{"a", e.range.a}, {"b", e.range.b}}},
                {"final_tie_threshold", e.final_tie_threshold},
                {"models", models}};
}

CascadeEnsemble ensemble_from_json(const json& j) {
    CascadeEnsemble e;
    e.range.a = j.at("range").at("a").get<double>();
    e.range.b = j.at("range").at("b").get<double>();
    e.final_tie_threshold = j.at("final_tie_threshold").get<double>();
    if (!score_range_valid(e.range)) throw std::invalid_argument("invalid score range");
    for (const auto& m : j.at("models")) e.models.push_back(scorer_params_from_json(m));
    if (e.models.empty()) throw std::invalid_argument("ensemble has no models");
    for (const auto& m : e.models) {
        if (m.dimensionality() != e.models[0].dimensionality()) {
            throw std::invalid_argument("ensemble models disagree on dimensionality");
        }
    }
    return e;
}

json to_json(const RegressionReport& r) {
    return json{{"n", r.n},
                {"acc_before", r.acc_before},
                {"acc_after", r.acc_after},
                {"fp_before", r.fp_before},
                {"fn_before", r.fn_before},
                {"fp_after", r.fp_after},
                {"fn_after", r.fn_after},
                {"regressed", r.regressed},
                {"repaired", r.repaired},
                {"regressed_ids", r.regressed_ids},
                {"repaired_ids", r.repaired_ids}};
}

json to_json(const CascadeMetrics& m) {
    return json{{"n", m.n},
                {"accuracy", m.accuracy},
                {"fp_rate", m.fp_rate},
                {"fn_rate", m.fn_rate},
                {"decided_count", m.decided_count},
                {"decided_accuracy", m.decided_accuracy},
                {"model0_accuracy", m.model0_accuracy}};
}

json to_json(const JointFailureTable& t) {
    return json{{"n", t.n},
                {"both_fail", t.both_fail},
                {"only_a", t.only_a},
                {"only_b", t.only_b},
                {"neither", t.neither},
                {"both_fail_identical", t.both_fail_identical}};
}

json to_json(const ImprovementFactor& f) {
    if (f.no_joint_failures) return json("no observed joint failures");
    return json(f.value);
}

json to_json(const PopulationCurvePoint& p) {
    return json{{"n_versions", p.n_versions},
                {"n_pairs", p.n_pairs},
                {"n_demands", p.n_demands},
                {"mean_single_pfd", p.mean_single_pfd},
                {"mean_pair_pfd", p.mean_pair_pfd},
                {"empirical_improvement", to_json(p.empirical_improvement)},
                {"analytic_single_pfd", p.analytic_single_pfd},
                {"analytic_pair_pfd", p.analytic_pair_pfd}};
}

json to_json(const PairStats& s) {
    return json{{"n", s.n},
                {"seed", s.seed},
                {"policy", s.policy == PairPolicy::both_must_fail ? "both-must-fail" : "either-flags"},
                {"a_fail_count", s.a_fail_count},
                {"b_fail_count", s.b_fail_count},
                {"both_fail_count", s.both_fail_count},
                {"either_fail_count", s.either_fail_count},
                {"a_fail_rate", s.a_fail_rate},
                {"b_fail_rate", s.b_fail_rate},
                {"both_fail_rate", s.both_fail_rate},
                {"either_fail_rate", s.either_fail_rate},
                {"system_failure_rate", s.system_failure_rate}};
}

json to_json(const TrustedCheckerStats& s) {
    return json{{"n", s.n},
                {"seed", s.seed},
                {"both_correct_count", s.both_correct_count},
                {"caught_count", s.caught_count},
                {"undermining_count", s.undermining_count},
                {"nuisance_count", s.nuisance_count},
                {"both_correct_rate", s.both_correct_rate},
                {"caught_rate", s.caught_rate},
                {"undermining_rate", s.undermining_rate},
                {"nuisance_rate", s.nuisance_rate}};
}

json to_json(const RouterMetrics& m) {
    return json{{"n", m.n},
                {"routing_accuracy", m.routing_accuracy},
                {"confusion_factor", m.confusion_factor},
                {"end_to_end_accuracy", m.end_to_end_accuracy},
                {"route_count", m.route_count},
                {"route_accuracy", m.route_accuracy}};
}

std::string dataset_to_csv(const LabeledDataset& ds) {
    std::string out = "id";
    for (std::size_t j = 0; j < ds.dimensionality; ++j) out += ",f" + std::to_string(j);
    out += ",label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out += std::to_string(ds.demands[i].id);
        for (double v : ds.demands[i].features) {
            out += ",";
            out += format_double(v);
        }
        out += "," + std::to_string(ds.labels[i]) + "\n";
    }
    return out;
}

void save_dataset_csv(const LabeledDataset& ds, const std::string& path) {
    write_text_file(path, dataset_to_csv(ds));
}

namespace {

[[noreturn]] void csv_error(std::size_t line, const std::string& what) {
    throw std::runtime_error("csv line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) csv_error(line, "malformed number '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        csv_error(line, "malformed number '" + s + "'");
    } catch (const std::out_of_range&) {
        csv_error(line, "number out of range '" + s + "'");
    }
}

}  // namespace

LabeledDataset dataset_from_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_fields(line);
    if (header.size() < 3 || header.front() != "id" || header.back() != "label") {
        throw std::runtime_error("csv line 1: expected header id,f0,...,label");
    }
    const std::size_t dim = header.size() - 2;
    for (std::size_t j = 0; j < dim; ++j) {
        if (header[j + 1] != "f" + std::to_string(j)) {
            throw std::runtime_error("csv line 1: expected feature column f" + std::to_string(j));
        }
    }

    LabeledDataset ds;
    ds.dimensionality = dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != dim + 2) csv_error(line_no, "expected " + std::to_string(dim + 2) + " fields");

        Demand d;
        try {
            d.id = std::stoull(fields[0]);
        } catch (const std::exception&) {
            csv_error(line_no, "malformed id '" + fields[0] + "'");
        }
        d.features.reserve(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            double v = parse_double(fields[j + 1], line_no);
            if (!std::isfinite(v)) csv_error(line_no, "non-finite feature");
            d.features.push_back(v);
        }
        const std::string& label = fields[dim + 1];
        if (label != "0" && label != "1") csv_error(line_no, "label must be 0 or 1, got '" + label + "'");
        ds.demands.push_back(std::move(d));
        ds.labels.push_back(label == "1" ? 1 : 0);
    }
    validate_dataset(ds);
    return ds;
}

LabeledDataset load_dataset_csv(const std::string& path) {
    return dataset_from_csv_text(read_text_file(path));
}

std::string ordered_scores_csv(const std::vector<std::pair<std::size_t, double>>& ranked) {
    std::string out = "rank,score\n";
    for (const auto& [rank, s] : ranked) {
        out += std::to_string(rank) + "," + format_double(s) + "\n";
    }
    return out;
}

std::string curve_csv(const std::vector<PopulationCurvePoint>& points) {
    std::string out = "mean_single_pfd,mean_pair_pfd,empirical_improvement,analytic_pair_pfd\n";
    for (const auto& p : points) {
        out += format_double(p.mean_single_pfd) + "," + format_double(p.mean_pair_pfd) + ",";
        if (!p.empirical_improvement.no_joint_failures) {
            out += format_double(p.empirical_improvement.value);
        }
        // An empty cell marks "no observed joint failures".
        out += "," + format_double(p.analytic_pair_pfd) + "\n";
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace divkit
