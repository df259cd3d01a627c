#pragma once
// Failure-correlation statistics for diverse channel pairs: empirical pfd,
// 1-out-of-2 joint failure rates, independence baselines, improvement
// factors, and the difficulty-profile model that explains why independently
// built versions fail together (shared per-demand difficulty).

#include <cstdint>
#include <vector>

namespace divkit {

struct ChannelOutcome {
    std::uint64_t demand_id = 0;
    bool failed = false;
    int output_tag = 0;  // identifies the produced output value class
};

struct ChannelResults {
    std::vector<ChannelOutcome> outcomes;
};

struct JointFailureTable {
    std::size_t n = 0;
    std::size_t both_fail = 0;
    std::size_t only_a = 0;
    std::size_t only_b = 0;
    std::size_t neither = 0;
    std::size_t both_fail_identical = 0;  // both fail with equal output_tag
};

// Exact 2x2 joint counts over a shared demand set. Throws on id mismatch.
JointFailureTable joint_failures(const ChannelResults& a, const ChannelResults& b);

// Probability of failure on demand: failed count / n.
double pfd(const ChannelResults& c);

// both_fail / n, or both_fail_identical / n when identical_only — the
// latter models a voter fooled only by matching wrong outputs.
double pair_pfd(const JointFailureTable& t, bool identical_only = false);

// Joint pfd two channels would have if they failed independently.
double independence_pfd(double pa, double pb);

// single_pfd / pair_pfd with an explicit marker when no joint failures were
// observed (never fabricated as a large number).
struct ImprovementFactor {
    bool no_joint_failures = false;
    double value = 0.0;  // meaningful only when no_joint_failures is false
};

ImprovementFactor improvement_factor(double single_pfd, double pair_pfd);

// Per-demand probability that a randomly drawn version fails on that demand.
struct DifficultyProfile {
    std::vector<double> theta;  // each in [0, 1]
};

bool difficulty_profile_valid(const DifficultyProfile& profile);

double expected_single_pfd(const DifficultyProfile& profile);  // mean(theta)
double expected_pair_pfd(const DifficultyProfile& profile);    // mean(theta^2)

struct PopulationCurvePoint {
    std::size_t n_versions = 0;
    std::size_t n_pairs = 0;
    std::size_t n_demands = 0;
    double mean_single_pfd = 0.0;
    double mean_pair_pfd = 0.0;
    ImprovementFactor empirical_improvement;
    double analytic_single_pfd = 0.0;
    double analytic_pair_pfd = 0.0;
};

// Samples n_versions failure sets (version v fails demand d independently
// with probability theta_d, stream keyed on (seed, v)), then n_pairs distinct
// version pairs, and compares empirical single/pair pfd with the analytic
// expectations. Deterministic in seed.
PopulationCurvePoint population_experiment(const DifficultyProfile& profile,
                                           std::size_t n_versions, std::size_t n_pairs,
                                           std::uint64_t seed);

}  // namespace divkit
