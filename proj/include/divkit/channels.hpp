#pragma once
// Simulation of diverse safety-channel arrangements: symmetric pairs with a
// consistency rule, a trusted channel with an advisory checker, and a binary
// router dispatching demands to two specialist models.
//
// Channel failures are Bernoulli per demand; correlation enters only through
// a shared difficulty profile (both channels see the same per-demand theta
// but draw independently given it).

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "divkit/dataset.hpp"
#include "divkit/diversity.hpp"
#include "divkit/scorer.hpp"

namespace divkit {

enum class FailureMode { detection, measurement };

struct ChannelSpec {
    std::string name;
    double constant_p = 0.0;  // used when profile is null
    std::shared_ptr<const DifficultyProfile> profile;  // tiled over demands when set
    FailureMode mode = FailureMode::detection;

    // Per-demand failure probability (profile values are tiled over the
    // demand index when the profile is shorter than the run).
    double failure_probability(std::size_t demand_index) const;
};

bool channel_spec_valid(const ChannelSpec& spec);

struct SensorReading {
    bool detected = false;
    std::optional<double> distance;  // meters, present only when measured
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class ConsistencyVerdict {
    consistent,
    missing_distance,     // detected but no distance produced
    spurious_distance,    // distance produced with nothing detected
    implausible_distance  // distance outside the plausible interval
};

// A reading is consistent iff (detected and the distance is present and
// plausible) or (not detected and no distance is produced).
ConsistencyVerdict consistency_check(const SensorReading& r, const Interval& plausible);

const char* consistency_verdict_name(ConsistencyVerdict v);

enum class PairPolicy { both_must_fail, either_flags };

struct PairStats {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    PairPolicy policy = PairPolicy::both_must_fail;
    std::size_t a_fail_count = 0, b_fail_count = 0;
    std::size_t both_fail_count = 0, either_fail_count = 0;
    double a_fail_rate = 0.0, b_fail_rate = 0.0;
    double both_fail_rate = 0.0;    // missed hazard under 1oo2 detection
    double either_fail_rate = 0.0;  // spurious flag when either channel trips
    double system_failure_rate = 0.0;  // per the requested policy
};

PairStats simulate_pair(const ChannelSpec& a, const ChannelSpec& b, std::size_t n_demands,
                        PairPolicy policy, std::uint64_t seed);

struct TrustedCheckerStats {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t both_correct_count = 0;
    std::size_t caught_count = 0;       // trusted wrong, checker correct: flag raised
    std::size_t undermining_count = 0;  // trusted wrong, checker wrong: unflagged failure
    std::size_t nuisance_count = 0;     // trusted correct, checker wrong: spurious flag
    double both_correct_rate = 0.0;
    double caught_rate = 0.0;
    double undermining_rate = 0.0;
    double nuisance_rate = 0.0;
};

TrustedCheckerStats simulate_trusted_checker(const ChannelSpec& trusted,
                                             const ChannelSpec& checker,
                                             std::size_t n_demands, std::uint64_t seed);

struct RouterSpec {
    ScorerParams router;                      // binary route classifier
    std::array<ScorerParams, 2> specialists;  // route-0 model, route-1 model
};

struct RoutedPrediction {
    int label = 0;
    int route = 0;
};

// The router picks a specialist with the usual threshold rule; the selected
// specialist's classification is the output.
RoutedPrediction route_predict(const RouterSpec& r, const Demand& d, double threshold = 0.5);

struct RouterMetrics {
    std::size_t n = 0;
    double routing_accuracy = 0.0;
    double confusion_factor = 0.0;  // fraction sent to the wrong specialist
    double end_to_end_accuracy = 0.0;
    std::array<std::size_t, 2> route_count{};     // demands per route taken
    std::array<double, 2> route_accuracy{};       // conditional accuracy per route taken
};

RouterMetrics router_metrics(const RouterSpec& r, const LabeledDataset& ds,
                             const std::vector<int>& true_routes, double threshold = 0.5);

}  // namespace divkit
