#include "divkit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <thread>

#include "divkit/cascade.hpp"
#include "divkit/regression.hpp"
#include "divkit/rng.hpp"
#include "divkit/serialize.hpp"

namespace divkit {

using nlohmann::json;

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index) {
    return master_seed ^ static_cast<std::uint64_t>(trial_index);
}

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError("config: " + msg); }

const json& require(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) config_fail(ctx + ": missing required field '" + key + "'");
    return *it;
}

void expect_keys(const json& j, const std::string& ctx,
                 std::initializer_list<const char*> allowed) {
    if (!j.is_object()) config_fail(ctx + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) config_fail(ctx + ": unknown field '" + it.key() + "'");
    }
}

double get_double(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number()) config_fail(ctx + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double get_double_or(const json& j, const char* key, double fallback, const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    return get_double(j, key, ctx);
}

std::uint64_t get_u64(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        config_fail(ctx + ": field '" + key + "' must be a non-negative integer");
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        config_fail(ctx + ": field '" + key + "' must be non-negative");
    }
    return v.get<std::uint64_t>();
}

std::uint64_t get_u64_or(const json& j, const char* key, std::uint64_t fallback,
                         const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    return get_u64(j, key, ctx);
}

std::vector<double> get_double_vec(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_array()) config_fail(ctx + ": field '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) config_fail(ctx + ": field '" + key + "' must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

TrainConfig parse_train(const json& j, const std::string& ctx) {
    expect_keys(j, ctx, {"learning_rate", "epochs", "l2_penalty"});
    TrainConfig cfg;
    cfg.learning_rate = get_double_or(j, "learning_rate", 0.1, ctx);
    cfg.epochs = static_cast<int>(get_u64_or(j, "epochs", 300, ctx));
    cfg.l2_penalty = get_double_or(j, "l2_penalty", 1e-4, ctx);
    if (!train_config_valid(cfg)) config_fail(ctx + ": invalid training parameters");
    return cfg;
}

GeneratorSpec parse_generator(const json& j, const std::string& ctx) {
    expect_keys(j, ctx,
                {"n", "dim", "center0", "center1", "spread0", "spread1", "hard_region", "seed"});
    GeneratorSpec spec;
    spec.n = static_cast<std::size_t>(get_u64(j, "n", ctx));
    spec.dim = static_cast<std::size_t>(get_u64(j, "dim", ctx));
    spec.center0 = get_double_vec(j, "center0", ctx);
    spec.center1 = get_double_vec(j, "center1", ctx);
    spec.spread0 = get_double(j, "spread0", ctx);
    spec.spread1 = get_double(j, "spread1", ctx);
    spec.seed = get_u64(j, "seed", ctx);
    if (j.contains("hard_region")) {
        const json& h = j.at("hard_region");
        expect_keys(h, ctx + ".hard_region", {"weight", "center", "spread", "class_offset"});
        HardRegionSpec hard;
        hard.weight = get_double(h, "weight", ctx + ".hard_region");
        hard.center = get_double_vec(h, "center", ctx + ".hard_region");
        hard.spread = get_double(h, "spread", ctx + ".hard_region");
        if (h.contains("class_offset")) {
            hard.class_offset = get_double_vec(h, "class_offset", ctx + ".hard_region");
        }
        spec.hard_region = std::move(hard);
    }
    if (!generator_spec_valid(spec)) config_fail(ctx + ": invalid generator spec");
    return spec;
}

DataSource parse_data(const json& j, const std::string& ctx) {
    expect_keys(j, ctx, {"generator", "path"});
    DataSource src;
    if (j.contains("generator") == j.contains("path")) {
        config_fail(ctx + ": exactly one of 'generator' or 'path' is required");
    }
    if (j.contains("generator")) {
        src.generator = parse_generator(j.at("generator"), ctx + ".generator");
    } else {
        src.path = j.at("path").get<std::string>();
        if (src.path->empty()) config_fail(ctx + ": empty dataset path");
    }
    return src;
}

DifficultyProfile parse_profile_segments(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty()) config_fail(ctx + ": expected a non-empty segment array");
    DifficultyProfile profile;
    for (const auto& seg : j) {
        expect_keys(seg, ctx, {"theta", "count"});
        double theta = get_double(seg, "theta", ctx);
        std::size_t count = static_cast<std::size_t>(get_u64(seg, "count", ctx));
        if (!(theta >= 0.0 && theta <= 1.0)) config_fail(ctx + ": theta outside [0, 1]");
        if (count < 1) config_fail(ctx + ": segment count must be positive");
        profile.theta.insert(profile.theta.end(), count, theta);
    }
    return profile;
}

ChannelSpec parse_channel(const json& j, const std::string& ctx) {
    expect_keys(j, ctx, {"name", "constant_p", "profile", "mode"});
    ChannelSpec spec;
    spec.name = require(j, "name", ctx).get<std::string>();
    if (j.contains("constant_p") == j.contains("profile")) {
        config_fail(ctx + ": exactly one of 'constant_p' or 'profile' is required");
    }
    if (j.contains("constant_p")) {
        spec.constant_p = get_double(j, "constant_p", ctx);
    } else {
        expect_keys(j.at("profile"), ctx + ".profile", {"segments"});
        auto profile = std::make_shared<DifficultyProfile>(
            parse_profile_segments(require(j.at("profile"), "segments", ctx + ".profile"),
                                   ctx + ".profile.segments"));
        spec.profile = std::move(profile);
    }
    std::string mode = j.contains("mode") ? j.at("mode").get<std::string>() : "detection";
    if (mode == "detection") {
        spec.mode = FailureMode::detection;
    } else if (mode == "measurement") {
        spec.mode = FailureMode::measurement;
    } else {
        config_fail(ctx + ": mode must be 'detection' or 'measurement'");
    }
    if (!channel_spec_valid(spec)) config_fail(ctx + ": failure probability outside [0, 1]");
    return spec;
}

RoutedGeneratorSpec parse_routed_generator(const json& j, const std::string& ctx) {
    expect_keys(j, ctx,
                {"n", "route_separation", "route_spread", "label_separation", "label_spread",
                 "seed"});
    RoutedGeneratorSpec spec;
    spec.n = static_cast<std::size_t>(get_u64(j, "n", ctx));
    spec.route_separation = get_double_or(j, "route_separation", 2.0, ctx);
    spec.route_spread = get_double_or(j, "route_spread", 0.3, ctx);
    spec.label_separation = get_double_or(j, "label_separation", 1.6, ctx);
    spec.label_spread = get_double_or(j, "label_spread", 0.5, ctx);
    spec.seed = get_u64(j, "seed", ctx);
    if (!routed_generator_spec_valid(spec) || spec.n < 8) {
        config_fail(ctx + ": invalid routed generator spec");
    }
    return spec;
}

std::size_t data_size_if_known(const DataSource& src) {
    return src.generator ? src.generator->n : 0;  // 0 = unknown until loaded
}

void validate_split_feasible(const std::vector<double>& fractions, std::size_t n,
                             const std::string& ctx) {
    if (n == 0) return;
    for (double f : fractions) {
        if (static_cast<std::size_t>(std::floor(f * static_cast<double>(n))) < 1) {
            config_fail(ctx + ": a split part would be empty for n=" + std::to_string(n));
        }
    }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) config_fail("top level must be an object");
    const std::string kind_str = require(doc, "kind", "top level").get<std::string>();

    ExperimentConfig cfg;
    cfg.master_seed = get_u64(doc, "master_seed", "top level");
    cfg.trials = static_cast<std::size_t>(get_u64_or(doc, "trials", 1, "top level"));
    if (cfg.trials < 1) config_fail("trials must be positive");

    if (kind_str == "cascade") {
        cfg.kind = ExperimentKind::cascade;
        expect_keys(doc, "cascade config",
                    {"kind", "master_seed", "trials", "depth", "range", "final_tie_threshold",
                     "train", "data"});
        cfg.depth = static_cast<std::size_t>(get_u64(doc, "depth", "cascade"));
        if (cfg.depth < 1) config_fail("cascade: depth must be at least 1");
        const json& r = require(doc, "range", "cascade");
        expect_keys(r, "cascade.range", {"a", "b"});
        cfg.range.a = get_double(r, "a", "cascade.range");
        cfg.range.b = get_double(r, "b", "cascade.range");
        if (!score_range_valid(cfg.range)) config_fail("cascade: invalid score range");
        cfg.final_tie_threshold = get_double_or(doc, "final_tie_threshold", 0.5, "cascade");
        if (cfg.final_tie_threshold < 0.0 || cfg.final_tie_threshold > 1.0) {
            config_fail("cascade: final_tie_threshold outside [0, 1]");
        }
        cfg.train = parse_train(require(doc, "train", "cascade"), "cascade.train");
        cfg.data = parse_data(require(doc, "data", "cascade"), "cascade.data");
        if (std::size_t n = data_size_if_known(cfg.data); n > 0 && n < 2) {
            config_fail("cascade: dataset too small");
        }
    } else if (kind_str == "retraining") {
        cfg.kind = ExperimentKind::retraining;
        expect_keys(doc, "retraining config",
                    {"kind", "master_seed", "trials", "threshold", "fresh_retrain", "fractions",
                     "train", "data"});
        cfg.threshold = get_double_or(doc, "threshold", 0.5, "retraining");
        if (cfg.threshold < 0.0 || cfg.threshold > 1.0) {
            config_fail("retraining: threshold outside [0, 1]");
        }
        cfg.fresh_retrain =
            doc.contains("fresh_retrain") ? doc.at("fresh_retrain").get<bool>() : false;
        cfg.fractions = get_double_vec(doc, "fractions", "retraining");
        SplitSpec probe{cfg.fractions, 0};
        if (cfg.fractions.size() != 3 || !split_spec_valid(probe)) {
            config_fail("retraining: fractions must be three positive values summing to 1");
        }
        cfg.train = parse_train(require(doc, "train", "retraining"), "retraining.train");
        cfg.data = parse_data(require(doc, "data", "retraining"), "retraining.data");
        validate_split_feasible(cfg.fractions, data_size_if_known(cfg.data), "retraining");
    } else if (kind_str == "diversity") {
        cfg.kind = ExperimentKind::diversity;
        expect_keys(doc, "diversity config",
                    {"kind", "master_seed", "trials", "n_versions", "n_pairs", "profiles"});
        cfg.n_versions = static_cast<std::size_t>(get_u64(doc, "n_versions", "diversity"));
        cfg.n_pairs = static_cast<std::size_t>(get_u64(doc, "n_pairs", "diversity"));
        if (cfg.n_versions < 2) config_fail("diversity: n_versions must be at least 2");
        if (cfg.n_pairs < 1 || cfg.n_pairs > cfg.n_versions * (cfg.n_versions - 1) / 2) {
            config_fail("diversity: n_pairs must be in [1, n_versions*(n_versions-1)/2]");
        }
        const json& profiles = require(doc, "profiles", "diversity");
        if (!profiles.is_array() || profiles.empty()) {
            config_fail("diversity: profiles must be a non-empty array");
        }
        for (const auto& p : profiles) {
            expect_keys(p, "diversity.profiles[]", {"name", "segments"});
            NamedProfile named;
            named.name = require(p, "name", "diversity.profiles[]").get<std::string>();
            named.profile = parse_profile_segments(require(p, "segments", "diversity.profiles[]"),
                                                   "diversity.profiles[].segments");
            cfg.profiles.push_back(std::move(named));
        }
    } else if (kind_str == "channels") {
        cfg.kind = ExperimentKind::channels;
        expect_keys(doc, "channels config",
                    {"kind", "master_seed", "trials", "n_demands", "pair", "trusted_checker"});
        cfg.n_demands = static_cast<std::size_t>(get_u64(doc, "n_demands", "channels"));
        if (cfg.n_demands < 1) config_fail("channels: n_demands must be positive");
        if (!doc.contains("pair") && !doc.contains("trusted_checker")) {
            config_fail("channels: at least one of 'pair' or 'trusted_checker' is required");
        }
        if (doc.contains("pair")) {
            const json& pair = doc.at("pair");
            expect_keys(pair, "channels.pair", {"a", "b", "policy"});
            cfg.pair_a = parse_channel(require(pair, "a", "channels.pair"), "channels.pair.a");
            cfg.pair_b = parse_channel(require(pair, "b", "channels.pair"), "channels.pair.b");
            std::string policy =
                pair.contains("policy") ? pair.at("policy").get<std::string>() : "both-must-fail";
            if (policy == "both-must-fail") {
                cfg.pair_policy = PairPolicy::both_must_fail;
            } else if (policy == "either-flags") {
                cfg.pair_policy = PairPolicy::either_flags;
            } else {
                config_fail("channels.pair: policy must be 'both-must-fail' or 'either-flags'");
            }
        }
        if (doc.contains("trusted_checker")) {
            const json& tc = doc.at("trusted_checker");
            expect_keys(tc, "channels.trusted_checker", {"trusted", "checker"});
            cfg.trusted = parse_channel(require(tc, "trusted", "channels.trusted_checker"),
                                        "channels.trusted_checker.trusted");
            cfg.checker = parse_channel(require(tc, "checker", "channels.trusted_checker"),
                                        "channels.trusted_checker.checker");
        }
    } else if (kind_str == "router") {
        cfg.kind = ExperimentKind::router;
        expect_keys(doc, "router config",
                    {"kind", "master_seed", "trials", "threshold", "train", "routed_generator"});
        cfg.threshold = get_double_or(doc, "threshold", 0.5, "router");
        if (cfg.threshold < 0.0 || cfg.threshold > 1.0) {
            config_fail("router: threshold outside [0, 1]");
        }
        cfg.train = parse_train(require(doc, "train", "router"), "router.train");
        cfg.routed_generator = parse_routed_generator(
            require(doc, "routed_generator", "router"), "router.routed_generator");
    } else {
        config_fail("unknown kind '" + kind_str +
                    "' (expected cascade|retraining|diversity|channels|router)");
    }
    return cfg;
}

namespace {

json generator_to_json(const GeneratorSpec& g) {
    json j{{"n", g.n},
           {"dim", g.dim},
           {"center0", g.center0},
           {"center1", g.center1},
           {"spread0", g.spread0},
           {"spread1", g.spread1},
           {"seed", g.seed}};
    if (g.hard_region) {
        json h{{"weight", g.hard_region->weight},
               {"center", g.hard_region->center},
               {"spread", g.hard_region->spread}};
        if (!g.hard_region->class_offset.empty()) {
            h["class_offset"] = g.hard_region->class_offset;
        }
        j["hard_region"] = std::move(h);
    }
    return j;
}

json data_to_json(const DataSource& src) {
    if (src.generator) return json{{"generator", generator_to_json(*src.generator)}};
    return json{{"path", *src.path}};
}

json train_to_json(const TrainConfig& t) {
    return json{{"learning_rate", t.learning_rate},
                {"epochs", t.epochs},
                {"l2_penalty", t.l2_penalty}};
}

json profile_to_segments(const DifficultyProfile& p) {
    // Run-length encode the theta vector back into segments.
    json segments = json::array();
    std::size_t i = 0;
    while (i < p.theta.size()) {
        std::size_t j = i;
        while (j < p.theta.size() && p.theta[j] == p.theta[i]) ++j;
        segments.push_back(json{{"theta", p.theta[i]}, {"count", j - i}});
        i = j;
    }
    return segments;
}

json channel_to_json(const ChannelSpec& c) {
    json j{{"name", c.name},
           {"mode", c.mode == FailureMode::detection ? "detection" : "measurement"}};
    if (c.profile) {
        j["profile"] = json{{"segments", profile_to_segments(*c.profile)}};
    } else {
        j["constant_p"] = c.constant_p;
    }
    return j;
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
    json j{{"master_seed", cfg.master_seed}, {"trials", cfg.trials}};
    switch (cfg.kind) {
        case ExperimentKind::cascade:
            j["kind"] = "cascade";
            j["depth"] = cfg.depth;
            j["range"] = json{{"a", cfg.range.a}, {"b", cfg.range.b}};
            j["final_tie_threshold"] = cfg.final_tie_threshold;
            j["train"] = train_to_json(cfg.train);
            j["data"] = data_to_json(cfg.data);
            break;
        case ExperimentKind::retraining:
            j["kind"] = "retraining";
            j["threshold"] = cfg.threshold;
            j["fresh_retrain"] = cfg.fresh_retrain;
            j["fractions"] = cfg.fractions;
            j["train"] = train_to_json(cfg.train);
            j["data"] = data_to_json(cfg.data);
            break;
        case ExperimentKind::diversity: {
            j["kind"] = "diversity";
            j["n_versions"] = cfg.n_versions;
            j["n_pairs"] = cfg.n_pairs;
            json profiles = json::array();
            for (const auto& p : cfg.profiles) {
                profiles.push_back(
                    json{{"name", p.name}, {"segments", profile_to_segments(p.profile)}});
            }
            j["profiles"] = std::move(profiles);
            break;
        }
        case ExperimentKind::channels:
            j["kind"] = "channels";
            j["n_demands"] = cfg.n_demands;
            if (cfg.pair_a) {
                j["pair"] = json{
                    {"a", channel_to_json(*cfg.pair_a)},
                    {"b", channel_to_json(*cfg.pair_b)},
                    {"policy", cfg.pair_policy == PairPolicy::both_must_fail ? "both-must-fail"
                                                                             : "either-flags"}};
            }
            if (cfg.trusted) {
                j["trusted_checker"] = json{{"trusted", channel_to_json(*cfg.trusted)},
                                            {"checker", channel_to_json(*cfg.checker)}};
            }
            break;
        case ExperimentKind::router: {
            j["kind"] = "router";
            j["threshold"] = cfg.threshold;
            j["train"] = train_to_json(cfg.train);
            const RoutedGeneratorSpec& g = *cfg.routed_generator;
            j["routed_generator"] = json{{"n", g.n},
                                         {"route_separation", g.route_separation},
                                         {"route_spread", g.route_spread},
                                         {"label_separation", g.label_separation},
                                         {"label_spread", g.label_spread},
                                         {"seed", g.seed}};
            break;
        }
    }
    return j;
}

namespace {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

LabeledDataset resolve_dataset(const DataSource& src) {
    if (src.generator) return gen_data(*src.generator);
    return load_dataset_csv(*src.path);
}

struct FileList {
    std::vector<std::pair<std::string, std::string>> files;
};

json rate_definitions() {
    return json{
        {"fp", "clean item (true label 1) flagged as attack (predicted 0), normalized by n"},
        {"fn", "attack item (true label 0) passed as clean (predicted 1), normalized by n"}};
}

RunResult finish_report(const ExperimentConfig& cfg, json results, json per_trial,
                        FileList files) {
    json report{{"tool_version", kToolVersion},
                {"resolved_config", config_to_json(cfg)},
                {"rate_definitions", rate_definitions()},
                {"results", std::move(results)},
                {"per_trial", std::move(per_trial)}};
    RunResult out;
    out.files.emplace_back("report.json", canonical_dump(report));
    for (auto& f : files.files) out.files.push_back(std::move(f));
    out.report = std::move(report);
    return out;
}

RunResult run_cascade(const ExperimentConfig& cfg, const LabeledDataset& data, unsigned threads) {
    struct TrialOut {
        json j;
        double cascade_acc = 0.0;
        double model0_acc = 0.0;
    };
    std::vector<TrialOut> trials(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        std::uint64_t seed = trial_seed(cfg.master_seed, t);
        TrainConfig train_cfg = cfg.train;
        train_cfg.init_seed = seed;
        CascadeBuildResult build = build_cascade(data, cfg.depth, cfg.range, train_cfg, seed);
        build.ensemble.final_tie_threshold = cfg.final_tie_threshold;
        CascadeMetrics metrics = evaluate_cascade(build.ensemble, build.holdout);

        json stage_sizes = json::array();
        for (const auto& ids : build.stage_training_ids) stage_sizes.push_back(ids.size());
        trials[t].cascade_acc = metrics.accuracy;
        trials[t].model0_acc = metrics.model0_accuracy;
        trials[t].j = json{{"trial", t},
                           {"seed", seed},
                           {"truncated", build.truncated},
                           {"n_models", build.ensemble.models.size()},
                           {"stage_training_sizes", std::move(stage_sizes)},
                           {"holdout_n", build.holdout.size()},
                           {"metrics", to_json(metrics)}};
    });

    std::vector<double> cascade_accs, model0_accs;
    std::size_t strict = 0;
    json per_trial = json::array();
    for (const auto& t : trials) {
        cascade_accs.push_back(t.cascade_acc);
        model0_accs.push_back(t.model0_acc);
        if (t.cascade_acc > t.model0_acc) ++strict;
        per_trial.push_back(t.j);
    }
    json results{{"median_cascade_accuracy", median(cascade_accs)},
                 {"median_model0_accuracy", median(model0_accs)},
                 {"strict_improvement_trials", strict},
                 {"trials", cfg.trials}};
    return finish_report(cfg, std::move(results), std::move(per_trial), {});
}

RunResult run_retraining(const ExperimentConfig& cfg, const LabeledDataset& data,
                         unsigned threads) {
    struct TrialOut {
        json j;
        double acc_before = 0.0, acc_after = 0.0;
        std::size_t regressed = 0, repaired = 0;
        std::string csv_before, csv_after;  // filled for trial 0 only
    };
    std::vector<TrialOut> trials(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        std::uint64_t seed = trial_seed(cfg.master_seed, t);
        TrainConfig train_cfg = cfg.train;
        train_cfg.init_seed = seed;
        SplitSpec spec{cfg.fractions, seed};
        RetrainingOutcome outcome =
            retraining_experiment(data, train_cfg, spec, cfg.threshold, cfg.fresh_retrain);
        trials[t].acc_before = outcome.report.acc_before;
        trials[t].acc_after = outcome.report.acc_after;
        trials[t].regressed = outcome.report.regressed;
        trials[t].repaired = outcome.report.repaired;
        trials[t].j = json{{"trial", t}, {"seed", seed}, {"report", to_json(outcome.report)}};
        if (t == 0) {
            trials[t].csv_before = ordered_scores_csv(ordered_scores(outcome.before));
            trials[t].csv_after = ordered_scores_csv(ordered_scores(outcome.after));
        }
    });

    std::vector<double> before, after;
    std::size_t with_regressions = 0, total_regressed = 0, total_repaired = 0;
    json per_trial = json::array();
    for (const auto& t : trials) {
        before.push_back(t.acc_before);
        after.push_back(t.acc_after);
        if (t.regressed > 0) ++with_regressions;
        total_regressed += t.regressed;
        total_repaired += t.repaired;
        per_trial.push_back(t.j);
    }
    json results{{"median_acc_before", median(before)},
                 {"median_acc_after", median(after)},
                 {"trials_with_regressions", with_regressions},
                 {"total_regressed", total_regressed},
                 {"total_repaired", total_repaired},
                 {"trials", cfg.trials}};
    FileList files;
    files.files.emplace_back("ordered_scores_before.csv", trials[0].csv_before);
    files.files.emplace_back("ordered_scores_after.csv", trials[0].csv_after);
    return finish_report(cfg, std::move(results), std::move(per_trial), std::move(files));
}

RunResult run_diversity(const ExperimentConfig& cfg, unsigned threads) {
    struct TrialOut {
        json j;
        std::vector<PopulationCurvePoint> points;
    };
    std::vector<TrialOut> trials(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        std::uint64_t seed = trial_seed(cfg.master_seed, t);
        json points = json::array();
        for (std::size_t i = 0; i < cfg.profiles.size(); ++i) {
            PopulationCurvePoint point = population_experiment(
                cfg.profiles[i].profile, cfg.n_versions, cfg.n_pairs, mix_key(seed, i));
            trials[t].points.push_back(point);
            json pj = to_json(point);
            pj["name"] = cfg.profiles[i].name;
            points.push_back(std::move(pj));
        }
        trials[t].j = json{{"trial", t}, {"seed", seed}, {"points", std::move(points)}};
    });

    json per_trial = json::array();
    for (const auto& t : trials) per_trial.push_back(t.j);
    json results{{"points", trials[0].j.at("points")}, {"trials", cfg.trials}};
    FileList files;
    files.files.emplace_back("difficulty_curve.csv", curve_csv(trials[0].points));
    return finish_report(cfg, std::move(results), std::move(per_trial), std::move(files));
}

bool same_profile(const ChannelSpec& a, const ChannelSpec& b) {
    if (!a.profile || !b.profile) return false;
    return a.profile->theta == b.profile->theta;
}

json channels_analytics(const ExperimentConfig& cfg) {
    json a = json::object();
    if (cfg.pair_a && cfg.pair_b) {
        if (!cfg.pair_a->profile && !cfg.pair_b->profile) {
            a["pair_both_fail"] = independence_pfd(cfg.pair_a->constant_p, cfg.pair_b->constant_p);
        } else if (same_profile(*cfg.pair_a, *cfg.pair_b)) {
            a["pair_both_fail"] = expected_pair_pfd(*cfg.pair_a->profile);
        }
    }
    if (cfg.trusted && cfg.checker && !cfg.trusted->profile && !cfg.checker->profile) {
        a["undermining"] = independence_pfd(cfg.trusted->constant_p, cfg.checker->constant_p);
    }
    return a;
}

RunResult run_channels(const ExperimentConfig& cfg, unsigned threads) {
    std::vector<json> trials(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        std::uint64_t seed = trial_seed(cfg.master_seed, t);
        json j{{"trial", t}, {"seed", seed}};
        if (cfg.pair_a) {
            j["pair"] = to_json(
                simulate_pair(*cfg.pair_a, *cfg.pair_b, cfg.n_demands, cfg.pair_policy, seed));
        }
        if (cfg.trusted) {
            j["trusted_checker"] = to_json(simulate_trusted_checker(
                *cfg.trusted, *cfg.checker, cfg.n_demands, mix_key(seed, 1)));
        }
        trials[t] = std::move(j);
    });

    json per_trial = json::array();
    for (const auto& t : trials) per_trial.push_back(t);
    json results{{"analytic", channels_analytics(cfg)}, {"trials", cfg.trials}};
    if (trials[0].contains("pair")) results["pair"] = trials[0].at("pair");
    if (trials[0].contains("trusted_checker")) {
        results["trusted_checker"] = trials[0].at("trusted_checker");
    }
    return finish_report(cfg, std::move(results), std::move(per_trial), {});
}

RunResult run_router(const ExperimentConfig& cfg, const RoutedData& routed, unsigned threads) {
    struct TrialOut {
        json j;
        double end_to_end = 0.0, single_model = 0.0, confusion = 0.0;
    };
    std::vector<TrialOut> trials(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        std::uint64_t seed = trial_seed(cfg.master_seed, t);
        SplitSpec half{{0.5, 0.5}, seed};
        std::vector<LabeledDataset> halves = split_dataset(routed.ds, half);
        const LabeledDataset& fit = halves[0];
        const LabeledDataset& eval = halves[1];

        // Routes travel with demand ids (generator assigns id = index).
        auto routes_of = [&](const LabeledDataset& part) {
            std::vector<int> routes;
            routes.reserve(part.size());
            for (const Demand& d : part.demands) {
                routes.push_back(routed.true_routes[static_cast<std::size_t>(d.id)]);
            }
            return routes;
        };
        std::vector<int> fit_routes = routes_of(fit);

        LabeledDataset router_ds = fit;
        router_ds.labels = fit_routes;
        LabeledDataset spec0{fit.dimensionality, {}, {}}, spec1{fit.dimensionality, {}, {}};
        for (std::size_t i = 0; i < fit.size(); ++i) {
            LabeledDataset& dest = fit_routes[i] == 0 ? spec0 : spec1;
            dest.demands.push_back(fit.demands[i]);
            dest.labels.push_back(fit.labels[i]);
        }

        TrainConfig tc = cfg.train;
        RouterSpec spec;
        tc.init_seed = mix_key(seed, 0);
        spec.router = train(router_ds, tc);
        tc.init_seed = mix_key(seed, 1);
        spec.specialists[0] = train(spec0, tc);
        tc.init_seed = mix_key(seed, 2);
        spec.specialists[1] = train(spec1, tc);

        RouterMetrics metrics = router_metrics(spec, eval, routes_of(eval), cfg.threshold);

        // Single global model baseline for comparison.
        tc.init_seed = mix_key(seed, 3);
        ScorerParams single = train(fit, tc);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < eval.size(); ++i) {
            if (classify(single, eval.demands[i], cfg.threshold) == eval.labels[i]) ++correct;
        }
        double single_acc = static_cast<double>(correct) / static_cast<double>(eval.size());

        trials[t].end_to_end = metrics.end_to_end_accuracy;
        trials[t].single_model = single_acc;
        trials[t].confusion = metrics.confusion_factor;
        trials[t].j = json{{"trial", t},
                           {"seed", seed},
                           {"metrics", to_json(metrics)},
                           {"single_model_accuracy", single_acc}};
    });

    std::vector<double> e2e, single, confusion;
    json per_trial = json::array();
    for (const auto& t : trials) {
        e2e.push_back(t.end_to_end);
        single.push_back(t.single_model);
        confusion.push_back(t.confusion);
        per_trial.push_back(t.j);
    }
    json results{{"median_end_to_end_accuracy", median(e2e)},
                 {"median_single_model_accuracy", median(single)},
                 {"median_confusion_factor", median(confusion)},
                 {"trials", cfg.trials}};
    return finish_report(cfg, std::move(results), std::move(per_trial), {});
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    switch (cfg.kind) {
        case ExperimentKind::cascade: {
            LabeledDataset data = resolve_dataset(cfg.data);
            if (data.size() < 2) throw ConfigError("config: cascade dataset too small");
            return run_cascade(cfg, data, threads);
        }
        case ExperimentKind::retraining: {
            LabeledDataset data = resolve_dataset(cfg.data);
            for (double f : cfg.fractions) {
                if (static_cast<std::size_t>(std::floor(f * static_cast<double>(data.size()))) <
                    1) {
                    throw ConfigError("config: retraining dataset too small for the split");
                }
            }
            return run_retraining(cfg, data, threads);
        }
        case ExperimentKind::diversity:
            return run_diversity(cfg, threads);
        case ExperimentKind::channels:
            return run_channels(cfg, threads);
        case ExperimentKind::router: {
            RoutedData routed = gen_routed_data(*cfg.routed_generator);
            return run_router(cfg, routed, threads);
        }
    }
    throw std::logic_error("unhandled experiment kind");
}

int run(const std::string& config_path, const RunOptions& opts) {
    json doc;
    try {
        doc = json::parse(read_text_file(config_path));
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    }
    return run_document(doc, opts);
}

int run_document(const json& doc, const RunOptions& opts) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config(doc);
        if (cfg.data.path) {
            // Surface missing/invalid dataset files as validation errors,
            // before any computation.
            load_dataset_csv(*cfg.data.path);
        }
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    }

    try {
        RunResult result = run_experiment(cfg, opts.threads);
        std::filesystem::create_directories(opts.out_dir);
        for (const auto& [name, text] : result.files) {
            write_text_file(opts.out_dir + "/" + name, text);
        }
        std::cout << "wrote " << result.files.size() << " file(s) to " << opts.out_dir << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace divkit
