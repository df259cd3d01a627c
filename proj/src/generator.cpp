#include "divkit/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "divkit/rng.hpp"

namespace divkit {

namespace {

bool finite_vector(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

bool generator_spec_valid(const GeneratorSpec& spec) {
    if (spec.n < 2 || spec.dim < 1) return false;
    if (spec.center0.size() != spec.dim || spec.center1.size() != spec.dim) return false;
    if (!finite_vector(spec.center0) || !finite_vector(spec.center1)) return false;
    if (!(spec.spread0 > 0.0) || !(spec.spread1 > 0.0)) return false;
    if (spec.hard_region) {
        const HardRegionSpec& h = *spec.hard_region;
        if (!(h.weight >= 0.0 && h.weight <= 1.0)) return false;
        if (h.center.size() != spec.dim || !finite_vector(h.center)) return false;
        if (!(h.spread > 0.0)) return false;
        if (!h.class_offset.empty() &&
            (h.class_offset.size() != spec.dim || !finite_vector(h.class_offset))) {
            return false;
        }
    }
    return true;
}

LabeledDataset gen_data(const GeneratorSpec& spec) {
    if (!generator_spec_valid(spec)) throw std::invalid_argument("invalid generator spec");

    LabeledDataset ds;
    ds.dimensionality = spec.dim;
    ds.demands.reserve(spec.n);
    ds.labels.reserve(spec.n);

    const double hard_weight = spec.hard_region ? spec.hard_region->weight : 0.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
        Rng rng(mix_key(spec.seed, rng_tag::gen, i));
        bool hard = rng.next_bernoulli(hard_weight);
        int label = rng.next_bernoulli(0.5) ? 1 : 0;

        Demand d;
        d.id = i;
        d.features.resize(spec.dim);
        if (hard) {
            const HardRegionSpec& h = *spec.hard_region;
            const double sign = label == 0 ? 1.0 : -1.0;
            for (std::size_t j = 0; j < spec.dim; ++j) {
                double offset = h.class_offset.empty() ? 0.0 : sign * h.class_offset[j];
                d.features[j] = h.center[j] + offset + h.spread * rng.next_gaussian();
            }
        } else {
            const std::vector<double>& center = label == 1 ? spec.center1 : spec.center0;
            const double spread = label == 1 ? spec.spread1 : spec.spread0;
            for (std::size_t j = 0; j < spec.dim; ++j) {
                d.features[j] = center[j] + spread * rng.next_gaussian();
            }
        }
        ds.demands.push_back(std::move(d));
        ds.labels.push_back(label);
    }
    return ds;
}

bool routed_generator_spec_valid(const RoutedGeneratorSpec& spec) {
    return spec.n >= 2 && spec.route_spread > 0.0 && spec.label_spread > 0.0 &&
           std::isfinite(spec.route_separation) && std::isfinite(spec.label_separation);
}

RoutedData gen_routed_data(const RoutedGeneratorSpec& spec) {
    if (!routed_generator_spec_valid(spec)) throw std::invalid_argument("invalid routed generator spec");

    RoutedData out;
    out.ds.dimensionality = 2;
    out.ds.demands.reserve(spec.n);
    out.ds.labels.reserve(spec.n);
    out.true_routes.reserve(spec.n);

    for (std::size_t i = 0; i < spec.n; ++i) {
        Rng rng(mix_key(spec.seed, rng_tag::gen, i));
        int route = rng.next_bernoulli(0.5) ? 1 : 0;
        int label = rng.next_bernoulli(0.5) ? 1 : 0;

        double route_sign = route == 1 ? 1.0 : -1.0;
        // Route 0 reads f1 normally; route 1 inverts the relationship, so a
        // single linear model cannot serve both routes.
        double label_sign = (label == 1 ? 1.0 : -1.0) * (route == 1 ? -1.0 : 1.0);

        Demand d;
        d.id = i;
        d.features = {
            route_sign * spec.route_separation / 2.0 + spec.route_spread * rng.next_gaussian(),
            label_sign * spec.label_separation / 2.0 + spec.label_spread * rng.next_gaussian()};
        out.ds.demands.push_back(std::move(d));
        out.ds.labels.push_back(label);
        out.true_routes.push_back(route);
    }
    return out;
}

}  // namespace divkit
