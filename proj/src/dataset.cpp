#include "divkit/dataset.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "divkit/rng.hpp"

namespace divkit {

void validate_dataset(const LabeledDataset& ds) {
    if (ds.labels.size() != ds.demands.size()) {
        throw std::invalid_argument("labels and demands differ in length");
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(ds.demands.size());
    for (std::size_t i = 0; i < ds.demands.size(); ++i) {
        const Demand& d = ds.demands[i];
        if (d.features.size() != ds.dimensionality) {
            throw std::invalid_argument("feature vector length does not match dimensionality");
        }
        for (double v : d.features) {
            if (!std::isfinite(v)) throw std::invalid_argument("invalid features");
        }
        if (ds.labels[i] != 0 && ds.labels[i] != 1) {
            throw std::invalid_argument("label must be 0 or 1");
        }
        if (!seen.insert(d.id).second) {
            throw std::invalid_argument("duplicate demand id");
        }
    }
}

LabeledDataset make_dataset(std::size_t dimensionality, std::vector<Demand> demands,
                            std::vector<int> labels) {
    LabeledDataset ds{dimensionality, std::move(demands), std::move(labels)};
    validate_dataset(ds);
    return ds;
}

bool split_spec_valid(const SplitSpec& spec) {
    if (spec.fractions.empty()) return false;
    double sum = 0.0;
    for (double f : spec.fractions) {
        if (!(f > 0.0) || !std::isfinite(f)) return false;
        sum += f;
    }
    return std::abs(sum - 1.0) <= 1e-9;
}

bool score_range_valid(const ScoreRange& r) {
    return r.a >= 0.0 && r.a <= r.b && r.b <= 1.0;
}

std::vector<LabeledDataset> split_dataset(const LabeledDataset& ds, const SplitSpec& spec) {
    if (ds.empty()) throw std::invalid_argument("empty dataset");
    if (!split_spec_valid(spec)) throw std::invalid_argument("invalid split");

    const std::size_t n = ds.size();
    const std::size_t parts = spec.fractions.size();

    std::vector<std::size_t> sizes(parts);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < parts; ++k) {
        sizes[k] = static_cast<std::size_t>(std::floor(spec.fractions[k] * static_cast<double>(n)));
        assigned += sizes[k];
    }
    // Remainder demands go to the earliest parts.
    for (std::size_t k = 0; assigned < n; k = (k + 1) % parts) {
        ++sizes[k];
        ++assigned;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_key(spec.seed, rng_tag::split));
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<LabeledDataset> out;
    out.reserve(parts);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < parts; ++k) {
        LabeledDataset part;
        part.dimensionality = ds.dimensionality;
        part.demands.reserve(sizes[k]);
        part.labels.reserve(sizes[k]);
        for (std::size_t i = 0; i < sizes[k]; ++i, ++pos) {
            part.demands.push_back(ds.demands[order[pos]]);
            part.labels.push_back(ds.labels[order[pos]]);
        }
        out.push_back(std::move(part));
    }
    return out;
}

}  // namespace divkit
