#pragma once
// Core dataset, split, and score-range types shared by every other module.
// Label convention: 1 = clean / negative class, 0 = attack / positive-detection
// class. All types are immutable after construction; operations are pure.

#include <cstdint>
#include <vector>

namespace divkit {

// One input instance submitted for classification.
struct Demand {
    std::uint64_t id = 0;
    std::vector<double> features;
};

struct LabeledDataset {
    std::size_t dimensionality = 0;
    std::vector<Demand> demands;
    std::vector<int> labels;  // parallel to demands, each 0 or 1

    std::size_t size() const { return demands.size(); }
    bool empty() const { return demands.empty(); }
};

// Validates all LabeledDataset invariants (parallel lengths, labels in {0,1},
// unique ids, finite features of the declared dimensionality). Throws
// std::invalid_argument on the first violation.
LabeledDataset make_dataset(std::size_t dimensionality, std::vector<Demand> demands,
                            std::vector<int> labels);

// Throws if ds violates any invariant; no-op otherwise.
void validate_dataset(const LabeledDataset& ds);

struct SplitSpec {
    std::vector<double> fractions;  // positive, summing to 1 within 1e-9
    std::uint64_t seed = 0;
};

bool split_spec_valid(const SplitSpec& spec);

// Confidence range [a, b]; scores inside the closed interval are "difficult".
struct ScoreRange {
    double a = 0.1;
    double b = 0.9;
};

bool score_range_valid(const ScoreRange& r);

// Partitions ds into |fractions| disjoint parts covering ds. Part k receives
// floor(fractions[k] * n) demands, with the remainder going to the earliest
// parts. Ordering within parts follows a seeded uniform shuffle; the result
// is a pure function of (ds, spec). No stratification by class.
std::vector<LabeledDataset> split_dataset(const LabeledDataset& ds, const SplitSpec& spec);

}  // namespace divkit
