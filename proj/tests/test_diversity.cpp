#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "divkit/diversity.hpp"
#include "divkit/rng.hpp"

using namespace divkit;

namespace {

ChannelResults channel(std::size_t n, const std::vector<std::uint64_t>& failed_ids,
                       int tag = 0) {
    ChannelResults c;
    for (std::uint64_t i = 0; i < n; ++i) {
        bool failed = std::find(failed_ids.begin(), failed_ids.end(), i) != failed_ids.end();
        c.outcomes.push_back({i, failed, failed ? tag : -1});
    }
    return c;
}

double binomial_se(double p, double trials) { return std::sqrt(p * (1.0 - p) / trials); }

}  // namespace

TEST_CASE("joint failure counts") {
    // Both channels fail on the same demand with equal tags.
    JointFailureTable t = joint_failures(channel(10, {2}, 7), channel(10, {2}, 7));
    CHECK(t.n == 10);
    CHECK(t.both_fail == 1);
    CHECK(t.both_fail_identical == 1);
    CHECK(t.neither == 9);
    CHECK(t.only_a == 0);
    CHECK(t.only_b == 0);

    // No failures anywhere.
    t = joint_failures(channel(10, {}), channel(10, {}));
    CHECK(t.neither == 10);
    CHECK(t.both_fail == 0);

    // Overlapping failure sets.
    t = joint_failures(channel(10, {1, 2}, 3), channel(10, {2, 3}, 4));
    CHECK(t.both_fail == 1);
    CHECK(t.only_a == 1);
    CHECK(t.only_b == 1);
    CHECK(t.neither == 7);
    CHECK(t.both_fail_identical == 0);  // tags 3 vs 4 differ

    CHECK(t.both_fail + t.only_a + t.only_b + t.neither == t.n);
}

TEST_CASE("joint failures require matching demand sets") {
    ChannelResults a = channel(3, {});
    ChannelResults b = channel(3, {});
    b.outcomes[2].demand_id = 42;
    CHECK_THROWS_AS(joint_failures(a, b), std::invalid_argument);
    ChannelResults shorter = channel(2, {});
    CHECK_THROWS_AS(joint_failures(a, shorter), std::invalid_argument);
}

TEST_CASE("pfd is the failure fraction") {
    CHECK(pfd(channel(10, {})) == 0.0);
    CHECK(pfd(channel(10, {1, 7})) == 0.2);
    ChannelResults empty;
    CHECK_THROWS_AS(pfd(empty), std::invalid_argument);

    Rng rng(42);
    ChannelResults random;
    std::size_t failed = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        bool f = rng.next_bernoulli(0.3);
        failed += f ? 1 : 0;
        random.outcomes.push_back({i, f, 0});
    }
    CHECK(pfd(random) == static_cast<double>(failed) / 500.0);
}

TEST_CASE("pair pfd and the identical-only variant") {
    JointFailureTable t = joint_failures(channel(10, {1, 2}, 3), channel(10, {2, 3}, 4));
    CHECK(pair_pfd(t) == 0.1);
    CHECK(pair_pfd(t, true) == 0.0);  // tags differ on the shared failure

    JointFailureTable none{10, 0, 0, 0, 10, 0};
    CHECK(pair_pfd(none) == 0.0);
}

TEST_CASE("independence baseline") {
    CHECK(independence_pfd(0.1, 0.1) == doctest::Approx(0.01));
    CHECK(independence_pfd(0.0, 0.7) == 0.0);
    CHECK(independence_pfd(0.2, 0.3) == doctest::Approx(0.06));
    CHECK_THROWS_AS(independence_pfd(-0.1, 0.5), std::invalid_argument);
}

TEST_CASE("improvement factor with the no-joint-failure marker") {
    ImprovementFactor f = improvement_factor(0.2, 0.1);
    CHECK_FALSE(f.no_joint_failures);
    CHECK(f.value == doctest::Approx(2.0));

    f = improvement_factor(0.1, 0.1);
    CHECK(f.value == doctest::Approx(1.0));

    f = improvement_factor(0.1, 0.0);
    CHECK(f.no_joint_failures);

    CHECK_THROWS_WITH_AS(improvement_factor(0.0, 0.0), "single channel never fails",
                         std::invalid_argument);
}

TEST_CASE("pair pfd never exceeds either margin, so the factor is at least one") {
    Rng rng(31);
    for (int round = 0; round < 50; ++round) {
        ChannelResults a, b;
        std::size_t n = 20 + rng.next_below(200);
        for (std::uint64_t i = 0; i < n; ++i) {
            a.outcomes.push_back({i, rng.next_bernoulli(0.3), static_cast<int>(rng.next_below(3))});
            b.outcomes.push_back({i, rng.next_bernoulli(0.3), static_cast<int>(rng.next_below(3))});
        }
        JointFailureTable t = joint_failures(a, b);
        double joint = pair_pfd(t);
        CHECK(joint <= pfd(a));
        CHECK(joint <= pfd(b));
        // Either margin of the same table works as the single channel.
        if (joint > 0.0) {
            CHECK(improvement_factor(std::max(pfd(a), pfd(b)), joint).value >= 1.0);
            CHECK(improvement_factor(std::min(pfd(a), pfd(b)), joint).value >= 1.0);
        }
        CHECK(t.both_fail_identical <= t.both_fail);
    }
}

TEST_CASE("expected pair pfd closed forms") {
    DifficultyProfile constant{std::vector<double>(50, 0.1)};
    CHECK(expected_single_pfd(constant) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(expected_pair_pfd(constant) == doctest::Approx(0.01).epsilon(1e-12));

    DifficultyProfile skewed{{0.2, 0.0}};
    CHECK(expected_single_pfd(skewed) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(expected_pair_pfd(skewed) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(expected_pair_pfd(skewed) > independence_pfd(0.1, 0.1));

    CHECK_THROWS_AS(expected_pair_pfd(DifficultyProfile{}), std::invalid_argument);
}

TEST_CASE("heterogeneity never beats independence of the means") {
    Rng rng(9090);
    for (int round = 0; round < 200; ++round) {
        DifficultyProfile p;
        std::size_t n = 2 + rng.next_below(100);
        for (std::size_t i = 0; i < n; ++i) p.theta.push_back(rng.next_unit());
        double m1 = expected_single_pfd(p);
        double m2 = expected_pair_pfd(p);
        CHECK(m2 >= m1 * m1 - 1e-15);
    }
}

TEST_CASE("population experiment with zero difficulty never fails") {
    DifficultyProfile zeros{std::vector<double>(100, 0.0)};
    PopulationCurvePoint point = population_experiment(zeros, 10, 20, 4);
    CHECK(point.mean_single_pfd == 0.0);
    CHECK(point.mean_pair_pfd == 0.0);
    CHECK(point.empirical_improvement.no_joint_failures);
}

TEST_CASE("population experiment matches the binomial model on constant difficulty") {
    DifficultyProfile constant{std::vector<double>(2000, 0.1)};
    PopulationCurvePoint point = population_experiment(constant, 200, 1000, 11);
    CHECK(point.analytic_pair_pfd == doctest::Approx(0.01).epsilon(1e-12));
    double se = binomial_se(0.01, 1000.0 * 2000.0);
    CHECK(std::abs(point.mean_pair_pfd - 0.01) <= 3.0 * se);
    double single_se = binomial_se(0.1, 200.0 * 2000.0);
    CHECK(std::abs(point.mean_single_pfd - 0.1) <= 3.0 * single_se);
}

TEST_CASE("population experiment is deterministic in its seed") {
    DifficultyProfile p{{0.05, 0.0, 0.2, 0.0, 0.0}};
    PopulationCurvePoint a = population_experiment(p, 50, 100, 123);
    PopulationCurvePoint b = population_experiment(p, 50, 100, 123);
    CHECK(a.mean_single_pfd == b.mean_single_pfd);
    CHECK(a.mean_pair_pfd == b.mean_pair_pfd);
}

TEST_CASE("population experiment validates its arguments") {
    DifficultyProfile p{{0.1}};
    CHECK_THROWS_AS(population_experiment(p, 1, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(population_experiment(p, 3, 4, 0), std::invalid_argument);  // > C(3,2)
    CHECK_THROWS_AS(population_experiment(DifficultyProfile{}, 5, 2, 0), std::invalid_argument);
    DifficultyProfile bad{{1.5}};
    CHECK_THROWS_AS(population_experiment(bad, 5, 2, 0), std::invalid_argument);
}
