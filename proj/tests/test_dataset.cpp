#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "divkit/dataset.hpp"
#include "divkit/rng.hpp"

using namespace divkit;

namespace {

LabeledDataset tiny_dataset(std::size_t n, std::size_t dim = 1) {
    LabeledDataset ds;
    ds.dimensionality = dim;
    for (std::size_t i = 0; i < n; ++i) {
        ds.demands.push_back({i, std::vector<double>(dim, static_cast<double>(i))});
        ds.labels.push_back(static_cast<int>(i % 2));
    }
    return ds;
}

std::multiset<std::uint64_t> id_multiset(const LabeledDataset& ds) {
    std::multiset<std::uint64_t> out;
    for (const auto& d : ds.demands) out.insert(d.id);
    return out;
}

}  // namespace

TEST_CASE("dataset validation rejects invariant violations") {
    CHECK_NOTHROW(make_dataset(1, {{0, {1.0}}, {1, {2.0}}}, {0, 1}));
    CHECK_THROWS(make_dataset(1, {{0, {1.0}}}, {0, 1}));            // length mismatch
    CHECK_THROWS(make_dataset(1, {{0, {1.0}}, {1, {2.0}}}, {0, 2}));  // bad label
    CHECK_THROWS(make_dataset(1, {{0, {1.0}}, {0, {2.0}}}, {0, 1}));  // duplicate id
    CHECK_THROWS(make_dataset(2, {{0, {1.0}}}, {0}));               // wrong dim
    CHECK_THROWS(make_dataset(1, {{0, {std::numeric_limits<double>::quiet_NaN()}}}, {0}));
    CHECK_THROWS(make_dataset(1, {{0, {std::numeric_limits<double>::infinity()}}}, {1}));
}

TEST_CASE("split sizes follow the 40/40/20 protocol") {
    LabeledDataset ds = tiny_dataset(10);
    auto parts = split_dataset(ds, {{0.4, 0.4, 0.2}, 7});
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].size() == 4);
    CHECK(parts[1].size() == 4);
    CHECK(parts[2].size() == 2);
}

TEST_CASE("identity split is a permutation") {
    LabeledDataset ds = tiny_dataset(23);
    auto parts = split_dataset(ds, {{1.0}, 99});
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].size() == ds.size());
    CHECK(id_multiset(parts[0]) == id_multiset(ds));
}

TEST_CASE("odd split puts the remainder in the earliest part") {
    LabeledDataset ds = tiny_dataset(101);
    auto parts = split_dataset(ds, {{0.5, 0.5}, 3});
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].size() == 51);
    CHECK(parts[1].size() == 50);

    // Union of ids is exactly the original set, all unique.
    std::set<std::uint64_t> ids;
    for (const auto& p : parts) {
        for (const auto& d : p.demands) ids.insert(d.id);
    }
    CHECK(ids.size() == 101);
}

TEST_CASE("split parts are disjoint and cover the dataset") {
    Rng rng(4711);
    for (int round = 0; round < 25; ++round) {
        std::size_t n = 1 + rng.next_below(150);
        LabeledDataset ds = tiny_dataset(n, 2);
        double f = 0.1 + 0.8 * rng.next_unit();
        SplitSpec spec{{f, 1.0 - f}, rng.next_u64()};
        auto parts = split_dataset(ds, spec);

        std::multiset<std::uint64_t> joined;
        std::size_t total = 0;
        for (const auto& p : parts) {
            total += p.size();
            for (const auto& d : p.demands) joined.insert(d.id);
        }
        CHECK(total == n);
        CHECK(joined == id_multiset(ds));  // multiset equality = disjoint + cover
    }
}

TEST_CASE("split is a pure function of dataset and spec") {
    LabeledDataset ds = tiny_dataset(64, 3);
    SplitSpec spec{{0.4, 0.4, 0.2}, 1234};
    auto a = split_dataset(ds, spec);
    auto b = split_dataset(ds, spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        REQUIRE(a[k].size() == b[k].size());
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            CHECK(a[k].demands[i].id == b[k].demands[i].id);
            CHECK(a[k].demands[i].features == b[k].demands[i].features);
            CHECK(a[k].labels[i] == b[k].labels[i]);
        }
    }
}

TEST_CASE("splits are not stratified by class") {
    // A heavily skewed dataset: with enough seeds some part's class ratio
    // must drift from the global 50/50.
    LabeledDataset ds = tiny_dataset(20);
    bool ratio_differs = false;
    for (std::uint64_t seed = 0; seed < 20 && !ratio_differs; ++seed) {
        auto parts = split_dataset(ds, {{0.5, 0.5}, seed});
        for (const auto& p : parts) {
            int ones = 0;
            for (int label : p.labels) ones += label;
            if (std::abs(static_cast<double>(ones) / static_cast<double>(p.size()) - 0.5) > 0.0) {
                ratio_differs = true;
            }
        }
    }
    CHECK(ratio_differs);
}

TEST_CASE("split errors") {
    LabeledDataset empty;
    empty.dimensionality = 1;
    CHECK_THROWS_WITH_AS(split_dataset(empty, {{1.0}, 0}), "empty dataset",
                         std::invalid_argument);

    LabeledDataset ds = tiny_dataset(4);
    CHECK_THROWS_WITH_AS(split_dataset(ds, {{0.5, 0.4}, 0}), "invalid split",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(split_dataset(ds, {{1.5, -0.5}, 0}), "invalid split",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(split_dataset(ds, {{}, 0}), "invalid split", std::invalid_argument);
}

TEST_CASE("score range validity") {
    CHECK(score_range_valid({0.1, 0.9}));
    CHECK(score_range_valid({0.0, 1.0}));
    CHECK(score_range_valid({0.5, 0.5}));
    CHECK_FALSE(score_range_valid({0.9, 0.1}));
    CHECK_FALSE(score_range_valid({-0.1, 0.5}));
    CHECK_FALSE(score_range_valid({0.5, 1.1}));
}
