#include "divkit/diversity.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "divkit/rng.hpp"

namespace divkit {

JointFailureTable joint_failures(const ChannelResults& a, const ChannelResults& b) {
    if (a.outcomes.size() != b.outcomes.size()) {
        throw std::invalid_argument("channel demand sets differ");
    }
    std::unordered_map<std::uint64_t, const ChannelOutcome*> b_by_id;
    b_by_id.reserve(b.outcomes.size());
    for (const auto& o : b.outcomes) {
        if (!b_by_id.emplace(o.demand_id, &o).second) {
            throw std::invalid_argument("duplicate demand id in channel results");
        }
    }

    JointFailureTable t;
    t.n = a.outcomes.size();
    for (const auto& oa : a.outcomes) {
        auto it = b_by_id.find(oa.demand_id);
        if (it == b_by_id.end()) throw std::invalid_argument("channel demand sets differ");
        const ChannelOutcome& ob = *it->second;
        if (oa.failed && ob.failed) {
            ++t.both_fail;
            if (oa.output_tag == ob.output_tag) ++t.both_fail_identical;
        } else if (oa.failed) {
            ++t.only_a;
        } else if (ob.failed) {
            ++t.only_b;
        } else {
            ++t.neither;
        }
    }
    return t;
}

double pfd(const ChannelResults& c) {
    if (c.outcomes.empty()) throw std::invalid_argument("empty channel results");
    std::size_t failed = 0;
    for (const auto& o : c.outcomes) failed += o.failed ? 1 : 0;
    return static_cast<double>(failed) / static_cast<double>(c.outcomes.size());
}

double pair_pfd(const JointFailureTable& t, bool identical_only) {
    if (t.n == 0) throw std::invalid_argument("empty joint failure table");
    std::size_t joint = identical_only ? t.both_fail_identical : t.both_fail;
    return static_cast<double>(joint) / static_cast<double>(t.n);
}

double independence_pfd(double pa, double pb) {
    if (pa < 0.0 || pa > 1.0 || pb < 0.0 || pb > 1.0) {
        throw std::invalid_argument("pfd outside [0, 1]");
    }
    return pa * pb;
}

ImprovementFactor improvement_factor(double single_pfd, double pair) {
    if (!(single_pfd > 0.0)) throw std::invalid_argument("single channel never fails");
    if (pair == 0.0) return {true, 0.0};
    return {false, single_pfd / pair};
}

bool difficulty_profile_valid(const DifficultyProfile& profile) {
    if (profile.theta.empty()) return false;
    for (double t : profile.theta) {
        if (!(t >= 0.0 && t <= 1.0)) return false;
    }
    return true;
}

double expected_single_pfd(const DifficultyProfile& profile) {
    if (profile.theta.empty()) throw std::invalid_argument("empty difficulty profile");
    double sum = 0.0;
    for (double t : profile.theta) sum += t;
    return sum / static_cast<double>(profile.theta.size());
}

double expected_pair_pfd(const DifficultyProfile& profile) {
    if (profile.theta.empty()) throw std::invalid_argument("empty difficulty profile");
    // Two independently drawn versions both fail on demand d with
    // probability theta_d^2.
    double sum = 0.0;
    for (double t : profile.theta) sum += t * t;
    return sum / static_cast<double>(profile.theta.size());
}

PopulationCurvePoint population_experiment(const DifficultyProfile& profile,
                                           std::size_t n_versions, std::size_t n_pairs,
                                           std::uint64_t seed) {
    if (!difficulty_profile_valid(profile)) throw std::invalid_argument("invalid difficulty profile");
    if (n_versions < 2) throw std::invalid_argument("need at least two versions");
    const std::size_t max_pairs = n_versions * (n_versions - 1) / 2;
    if (n_pairs < 1 || n_pairs > max_pairs) {
        throw std::invalid_argument("n_pairs exceeds the number of distinct version pairs");
    }

    const std::size_t n = profile.theta.size();
    PopulationCurvePoint point;
    point.n_versions = n_versions;
    point.n_pairs = n_pairs;
    point.n_demands = n;
    point.analytic_single_pfd = expected_single_pfd(profile);
    point.analytic_pair_pfd = expected_pair_pfd(profile);

    // Per-version failure bitmaps, one stream per version so results do not
    // depend on evaluation order.
    std::vector<std::vector<std::uint8_t>> fails(n_versions);
    double single_sum = 0.0;
    for (std::size_t v = 0; v < n_versions; ++v) {
        Rng rng(mix_key(seed, rng_tag::version, v));
        fails[v].resize(n);
        std::size_t failed = 0;
        for (std::size_t d = 0; d < n; ++d) {
            bool f = rng.next_bernoulli(profile.theta[d]);
            fails[v][d] = f ? 1 : 0;
            failed += f ? 1 : 0;
        }
        single_sum += static_cast<double>(failed) / static_cast<double>(n);
    }
    point.mean_single_pfd = single_sum / static_cast<double>(n_versions);

    // Distinct unordered pairs, rejection-sampled.
    Rng pair_rng(mix_key(seed, rng_tag::pairs));
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    while (chosen.size() < n_pairs) {
        std::size_t u = static_cast<std::size_t>(pair_rng.next_below(n_versions));
        std::size_t v = static_cast<std::size_t>(pair_rng.next_below(n_versions));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        chosen.insert({u, v});
    }

    double pair_sum = 0.0;
    for (const auto& [u, v] : chosen) {
        std::size_t both = 0;
        const auto& fu = fails[u];
        const auto& fv = fails[v];
        for (std::size_t d = 0; d < n; ++d) both += (fu[d] & fv[d]);
        pair_sum += static_cast<double>(both) / static_cast<double>(n);
    }
    point.mean_pair_pfd = pair_sum / static_cast<double>(n_pairs);
    point.empirical_improvement =
        point.mean_single_pfd > 0.0
            ? improvement_factor(point.mean_single_pfd, point.mean_pair_pfd)
            : ImprovementFactor{true, 0.0};
    return point;
}

}  // namespace divkit
