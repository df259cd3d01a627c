#include "divkit/channels.hpp"

#include <cmath>
#include <stdexcept>

#include "divkit/rng.hpp"

namespace divkit {

double ChannelSpec::failure_probability(std::size_t demand_index) const {
    if (!profile) return constant_p;
    return profile->theta[demand_index % profile->theta.size()];
}

bool channel_spec_valid(const ChannelSpec& spec) {
    if (spec.profile) return difficulty_profile_valid(*spec.profile);
    return spec.constant_p >= 0.0 && spec.constant_p <= 1.0;
}

ConsistencyVerdict consistency_check(const SensorReading& r, const Interval& plausible) {
    if (!(plausible.lo <= plausible.hi)) throw std::invalid_argument("empty plausible interval");
    if (r.detected) {
        if (!r.distance.has_value()) return ConsistencyVerdict::missing_distance;
        if (*r.distance < plausible.lo || *r.distance > plausible.hi) {
            return ConsistencyVerdict::implausible_distance;
        }
        return ConsistencyVerdict::consistent;
    }
    if (r.distance.has_value()) return ConsistencyVerdict::spurious_distance;
    return ConsistencyVerdict::consistent;
}

const char* consistency_verdict_name(ConsistencyVerdict v) {
    switch (v) {
        case ConsistencyVerdict::consistent: return "consistent";
        case ConsistencyVerdict::missing_distance: return "missing-distance";
        case ConsistencyVerdict::spurious_distance: return "spurious-distance";
        case ConsistencyVerdict::implausible_distance: return "implausible-distance";
    }
    return "unknown";
}

namespace {

// Counter-based draw keyed on (seed, demand, channel slot) so parallel
// evaluation across demands matches sequential exactly.
bool draw_failure(const ChannelSpec& spec, std::uint64_t seed, std::size_t demand_index,
                  std::uint64_t slot) {
    Rng rng(mix_key(mix_key(seed, rng_tag::channel, demand_index), slot));
    return rng.next_bernoulli(spec.failure_probability(demand_index));
}

}  // namespace

PairStats simulate_pair(const ChannelSpec& a, const ChannelSpec& b, std::size_t n_demands,
                        PairPolicy policy, std::uint64_t seed) {
    if (n_demands < 1) throw std::invalid_argument("need at least one demand");
    if (!channel_spec_valid(a) || !channel_spec_valid(b)) {
        throw std::invalid_argument("invalid channel spec");
    }

    PairStats s;
    s.n = n_demands;
    s.seed = seed;
    s.policy = policy;
    for (std::size_t d = 0; d < n_demands; ++d) {
        bool fa = draw_failure(a, seed, d, 0);
        bool fb = draw_failure(b, seed, d, 1);
        s.a_fail_count += fa ? 1 : 0;
        s.b_fail_count += fb ? 1 : 0;
        s.both_fail_count += (fa && fb) ? 1 : 0;
        s.either_fail_count += (fa || fb) ? 1 : 0;
    }
    const double n = static_cast<double>(n_demands);
    s.a_fail_rate = static_cast<double>(s.a_fail_count) / n;
    s.b_fail_rate = static_cast<double>(s.b_fail_count) / n;
    s.both_fail_rate = static_cast<double>(s.both_fail_count) / n;
    s.either_fail_rate = static_cast<double>(s.either_fail_count) / n;
    s.system_failure_rate =
        policy == PairPolicy::both_must_fail ? s.both_fail_rate : s.either_fail_rate;
    return s;
}

TrustedCheckerStats simulate_trusted_checker(const ChannelSpec& trusted,
                                             const ChannelSpec& checker,
                                             std::size_t n_demands, std::uint64_t seed) {
    if (n_demands < 1) throw std::invalid_argument("need at least one demand");
    if (!channel_spec_valid(trusted) || !channel_spec_valid(checker)) {
        throw std::invalid_argument("invalid channel spec");
    }

    TrustedCheckerStats s;
    s.n = n_demands;
    s.seed = seed;
    for (std::size_t d = 0; d < n_demands; ++d) {
        bool ft = draw_failure(trusted, seed, d, 0);
        bool fc = draw_failure(checker, seed, d, 1);
        if (!ft && !fc) {
            ++s.both_correct_count;
        } else if (ft && !fc) {
            ++s.caught_count;
        } else if (ft && fc) {
            ++s.undermining_count;
        } else {
            ++s.nuisance_count;
        }
    }
    const double n = static_cast<double>(n_demands);
    s.both_correct_rate = static_cast<double>(s.both_correct_count) / n;
    s.caught_rate = static_cast<double>(s.caught_count) / n;
    s.undermining_rate = static_cast<double>(s.undermining_count) / n;
    s.nuisance_rate = static_cast<double>(s.nuisance_count) / n;
    return s;
}

RoutedPrediction route_predict(const RouterSpec& r, const Demand& d, double threshold) {
    int route = classify(r.router, d, threshold);
    int label = classify(r.specialists[static_cast<std::size_t>(route)], d, threshold);
    return {label, route};
}

RouterMetrics router_metrics(const RouterSpec& r, const LabeledDataset& ds,
                             const std::vector<int>& true_routes, double threshold) {
    if (ds.empty()) throw std::invalid_argument("empty dataset");
    if (true_routes.size() != ds.size()) {
        throw std::invalid_argument("true_routes not aligned with dataset");
    }
    for (int route : true_routes) {
        if (route != 0 && route != 1) throw std::invalid_argument("route must be 0 or 1");
    }

    RouterMetrics m;
    m.n = ds.size();
    std::size_t routed_correctly = 0, correct = 0;
    std::array<std::size_t, 2> route_correct{};
    for (std::size_t i = 0; i < ds.size(); ++i) {
        RoutedPrediction pred = route_predict(r, ds.demands[i], threshold);
        auto route = static_cast<std::size_t>(pred.route);
        ++m.route_count[route];
        if (pred.route == true_routes[i]) ++routed_correctly;
        if (pred.label == ds.labels[i]) {
            ++correct;
            ++route_correct[route];
        }
    }
    const double n = static_cast<double>(m.n);
    m.routing_accuracy = static_cast<double>(routed_correctly) / n;
    m.confusion_factor = static_cast<double>(m.n - routed_correctly) / n;
    m.end_to_end_accuracy = static_cast<double>(correct) / n;
    for (std::size_t route = 0; route < 2; ++route) {
        if (m.route_count[route] > 0) {
            m.route_accuracy[route] = static_cast<double>(route_correct[route]) /
                                      static_cast<double>(m.route_count[route]);
        }
    }
    return m;
}

}  // namespace divkit
