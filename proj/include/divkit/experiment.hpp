#pragma once
// Experiment harness: validated configs, per-kind drivers, and report
// emission. Every trial draws its randomness from (master_seed XOR
// trial_index), so trials can run concurrently and still aggregate to a
// byte-identical report.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "divkit/channels.hpp"
#include "divkit/dataset.hpp"
#include "divkit/diversity.hpp"
#include "divkit/generator.hpp"
#include "divkit/scorer.hpp"

namespace divkit {

// Configuration problems found before any computation or file output.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { cascade, retraining, diversity, channels, router };

struct DataSource {
    std::optional<GeneratorSpec> generator;
    std::optional<std::string> path;  // dataset CSV
};

struct NamedProfile {
    std::string name;
    DifficultyProfile profile;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::cascade;
    std::uint64_t master_seed = 0;
    std::size_t trials = 1;

    // cascade / retraining
    DataSource data;
    TrainConfig train;
    double threshold = 0.5;

    // cascade
    std::size_t depth = 2;
    ScoreRange range;
    double final_tie_threshold = 0.5;

    // retraining
    std::vector<double> fractions;
    bool fresh_retrain = false;

    // diversity
    std::size_t n_versions = 0;
    std::size_t n_pairs = 0;
    std::vector<NamedProfile> profiles;

    // channels
    std::size_t n_demands = 0;
    std::optional<ChannelSpec> pair_a, pair_b;
    PairPolicy pair_policy = PairPolicy::both_must_fail;
    std::optional<ChannelSpec> trusted, checker;

    // router
    std::optional<RoutedGeneratorSpec> routed_generator;
};

// Parses and fully validates a config document; throws ConfigError with the
// offending field named. The returned config has every default resolved.
ExperimentConfig parse_config(const nlohmann::json& doc);

// Canonical JSON form of a resolved config; reruns of this document
// reproduce the report body byte-for-byte.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct RunOptions {
    std::string out_dir;      // resolved by the caller (flag > DIVKIT_OUT > "out")
    unsigned threads = 1;
};

struct RunResult {
    nlohmann::json report;
    // path (relative to out_dir) -> contents, includes report.json
    std::vector<std::pair<std::string, std::string>> files;
};

// Runs the configured experiment and assembles the report plus CSV side
// files. Pure given (cfg, threads): no filesystem access.
RunResult run_experiment(const ExperimentConfig& cfg, unsigned threads);

// Loads, validates, runs, and writes report files under opts.out_dir.
// Returns 0 on success, 1 on validation errors, 2 on runtime errors;
// failures are reported on stderr before anything is written.
int run(const std::string& config_path, const RunOptions& opts);

// Same, for an already-parsed config document (CLI flag overrides are
// applied to the document before this call).
int run_document(const nlohmann::json& doc, const RunOptions& opts);

// Shared helpers for drivers and tests.
double median(std::vector<double> values);
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace divkit
