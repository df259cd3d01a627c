#pragma once
// Synthetic labeled data from Gaussian cluster mixtures. Stands in for the
// network-session corpora the experiments were designed around; every draw
// is keyed on (seed, demand index) so datasets are reproducible and
// independent of generation order.

#include <cstdint>
#include <optional>
#include <vector>

#include "divkit/dataset.hpp"

namespace divkit {

// Overlapping cluster pair injected to create in-between-score demands. With
// an empty class_offset both labels share the same center, so no scorer can
// separate the region confidently; a non-empty offset shifts class 0 to
// center + offset and class 1 to center - offset, giving the region its own
// local structure.
struct HardRegionSpec {
    double weight = 0.0;  // fraction of demands drawn from the hard region
    std::vector<double> center;
    double spread = 0.5;
    std::vector<double> class_offset;  // empty = coincident clusters
};

struct GeneratorSpec {
    std::size_t n = 0;
    std::size_t dim = 1;
    std::vector<double> center0;  // attack-class cluster center
    std::vector<double> center1;  // clean-class cluster center
    double spread0 = 0.5;
    double spread1 = 0.5;
    std::optional<HardRegionSpec> hard_region;
    std::uint64_t seed = 0;
};

bool generator_spec_valid(const GeneratorSpec& spec);

LabeledDataset gen_data(const GeneratorSpec& spec);

// Routed data for the router/specialist experiments: the route shifts f0,
// and the label shifts f1 with a route-dependent sign, so each route is
// linearly separable on its own but a single global model must compromise.
struct RoutedGeneratorSpec {
    std::size_t n = 0;
    double route_separation = 2.0;  // f0 distance between route clusters
    double route_spread = 0.3;
    double label_separation = 1.6;  // f1 distance between label clusters
    double label_spread = 0.5;
    std::uint64_t seed = 0;
};

struct RoutedData {
    LabeledDataset ds;          // dimensionality 2
    std::vector<int> true_routes;
};

bool routed_generator_spec_valid(const RoutedGeneratorSpec& spec);

RoutedData gen_routed_data(const RoutedGeneratorSpec& spec);

}  // namespace divkit
