#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "divkit/cascade.hpp"
#include "divkit/generator.hpp"
#include "divkit/scorer.hpp"

using namespace divkit;

namespace {

GeneratorSpec separated(std::size_t n, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.n = n;
    spec.dim = 2;
    spec.center0 = {-2.0, 0.0};
    spec.center1 = {2.0, 0.0};
    spec.spread0 = spec.spread1 = 0.4;
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("well-separated clusters are learned almost perfectly") {
    LabeledDataset ds = gen_data(separated(100, 50));
    ScorerParams p = train(ds, {0.1, 300, 1e-4, 50});
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (classify(p, ds.demands[i], 0.5) == ds.labels[i]) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(ds.size()) >= 0.99);
}

TEST_CASE("the hard region feeds the difficult partition") {
    GeneratorSpec spec = separated(2000, 60);
    spec.hard_region = HardRegionSpec{0.3, {0.0, 0.0}, 0.45, {}};  // coincident clusters
    LabeledDataset ds = gen_data(spec);

    ScorerParams p = train(ds, {0.1, 300, 1e-4, 60});
    std::size_t in_band = 0;
    for (const auto& d : ds.demands) {
        double s = score(p, d);
        if (s >= 0.1 && s <= 0.9) ++in_band;
    }
    CHECK(static_cast<double>(in_band) / static_cast<double>(ds.size()) >= 0.10);
}

TEST_CASE("generation is deterministic in the spec") {
    GeneratorSpec spec = separated(200, 123);
    LabeledDataset a = gen_data(spec);
    LabeledDataset b = gen_data(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.demands[i].id == b.demands[i].id);
        CHECK(a.demands[i].features == b.demands[i].features);
        CHECK(a.labels[i] == b.labels[i]);
    }

    GeneratorSpec other = spec;
    other.seed = 124;
    LabeledDataset c = gen_data(other);
    bool any_differs = false;
    for (std::size_t i = 0; i < a.size() && !any_differs; ++i) {
        any_differs = a.demands[i].features != c.demands[i].features;
    }
    CHECK(any_differs);
}

TEST_CASE("generated datasets satisfy dataset invariants") {
    GeneratorSpec spec = separated(500, 9);
    spec.hard_region = HardRegionSpec{0.2, {0.0, 0.0}, 0.3, {0.4, 0.0}};
    LabeledDataset ds = gen_data(spec);
    CHECK_NOTHROW(validate_dataset(ds));
    CHECK(ds.size() == 500);
}

TEST_CASE("generator rejects invalid specs") {
    GeneratorSpec spec = separated(10, 0);
    spec.center1 = {1.0};  // wrong dimensionality
    CHECK_THROWS_AS(gen_data(spec), std::invalid_argument);

    spec = separated(10, 0);
    spec.spread0 = 0.0;
    CHECK_THROWS_AS(gen_data(spec), std::invalid_argument);

    spec = separated(1, 0);
    CHECK_THROWS_AS(gen_data(spec), std::invalid_argument);

    spec = separated(10, 0);
    spec.hard_region = HardRegionSpec{1.5, {0.0, 0.0}, 0.3, {}};
    CHECK_THROWS_AS(gen_data(spec), std::invalid_argument);
}

TEST_CASE("routed data keeps routes balanced and separable per route") {
    RoutedGeneratorSpec spec;
    spec.n = 2000;
    spec.seed = 14;
    RoutedData routed = gen_routed_data(spec);
    REQUIRE(routed.ds.size() == 2000);
    REQUIRE(routed.true_routes.size() == 2000);

    std::size_t route1 = 0;
    for (int r : routed.true_routes) route1 += static_cast<std::size_t>(r);
    double balance = static_cast<double>(route1) / 2000.0;
    CHECK(balance > 0.4);
    CHECK(balance < 0.6);

    // Each route is linearly separable in f1 (with its own orientation), so a
    // per-route scorer fits it well.
    for (int r = 0; r < 2; ++r) {
        LabeledDataset part;
        part.dimensionality = 2;
        for (std::size_t i = 0; i < routed.ds.size(); ++i) {
            if (routed.true_routes[i] != r) continue;
            part.demands.push_back(routed.ds.demands[i]);
            part.labels.push_back(routed.ds.labels[i]);
        }
        ScorerParams p = train(part, {0.1, 300, 1e-4, 5});
        std::size_t correct = 0;
        for (std::size_t i = 0; i < part.size(); ++i) {
            if (classify(p, part.demands[i], 0.5) == part.labels[i]) ++correct;
        }
        CHECK(static_cast<double>(correct) / static_cast<double>(part.size()) >= 0.9);
    }
}
