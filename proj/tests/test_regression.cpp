#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "divkit/generator.hpp"
#include "divkit/regression.hpp"
#include "divkit/rng.hpp"

using namespace divkit;

namespace {

std::vector<PredictionRecord> arm(const std::vector<int>& truths, const std::vector<int>& preds) {
    std::vector<PredictionRecord> out;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        out.push_back({i, preds[i] == 1 ? 0.8 : 0.2, preds[i], truths[i]});
    }
    return out;
}

}  // namespace

TEST_CASE("correctness vector is element-wise equality") {
    CHECK(correctness_vector(arm({1}, {1})) == std::vector<bool>{true});
    CHECK(correctness_vector(arm({1}, {0})) == std::vector<bool>{false});
    CHECK(correctness_vector(arm({1, 0, 1, 0}, {1, 1, 0, 0})) ==
          std::vector<bool>{true, false, false, true});
}

TEST_CASE("identical arms diff to zero transitions") {
    auto a = arm({1, 0, 1, 0}, {1, 1, 0, 0});
    RegressionReport rep = regression_diff(a, a);
    CHECK(rep.regressed == 0);
    CHECK(rep.repaired == 0);
    CHECK(rep.acc_before == rep.acc_after);
}

TEST_CASE("hand-enumerated four-item transition diff") {
    // Correctness before [C, C, W, W], after [C, W, C, W].
    std::vector<int> truths{1, 1, 1, 1};
    auto before = arm(truths, {1, 1, 0, 0});
    auto after = arm(truths, {1, 0, 1, 0});
    RegressionReport rep = regression_diff(before, after);
    CHECK(rep.regressed == 1);
    CHECK(rep.repaired == 1);
    CHECK(rep.regressed_ids == std::vector<std::uint64_t>{1});
    CHECK(rep.repaired_ids == std::vector<std::uint64_t>{2});
    CHECK(rep.acc_after == rep.acc_before);
}

TEST_CASE("diff rejects arms that disagree on ground truth") {
    auto before = arm({1, 0}, {1, 0});
    auto after = arm({1, 1}, {1, 1});  // second truth differs
    CHECK_THROWS_WITH_AS(regression_diff(before, after), "arms disagree on ground truth",
                         std::invalid_argument);

    auto shifted = arm({1, 0}, {1, 0});
    shifted[1].demand_id = 99;
    CHECK_THROWS_WITH_AS(regression_diff(before, shifted), "arms disagree on ground truth",
                         std::invalid_argument);

    auto shorter = arm({1}, {1});
    CHECK_THROWS_AS(regression_diff(before, shorter), std::invalid_argument);

    // Duplicate ids in one arm cannot masquerade as alignment.
    auto dup_before = arm({1, 1}, {1, 1});
    dup_before[1].demand_id = dup_before[0].demand_id;
    auto distinct_after = arm({1, 1}, {1, 1});
    CHECK_THROWS_WITH_AS(regression_diff(dup_before, distinct_after),
                         "arms disagree on ground truth", std::invalid_argument);
}

TEST_CASE("diff matches a brute-force transition count on random arms") {
    Rng rng(10001);
    for (int round = 0; round < 10; ++round) {
        const std::size_t n = 10000;
        std::vector<PredictionRecord> before, after;
        for (std::size_t i = 0; i < n; ++i) {
            int truth = static_cast<int>(rng.next_below(2));
            before.push_back({i, rng.next_unit(), static_cast<int>(rng.next_below(2)), truth});
            after.push_back({i, rng.next_unit(), static_cast<int>(rng.next_below(2)), truth});
        }
        // Shuffle the after arm so alignment must go through ids.
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(after[i], after[rng.next_below(i + 1)]);
        }

        std::size_t brute_regressed = 0, brute_repaired = 0;
        std::size_t correct_before = 0, correct_after = 0;
        for (std::size_t i = 0; i < n; ++i) {
            bool cb = before[i].predicted_label == before[i].true_label;
            if (cb) ++correct_before;
        }
        std::vector<PredictionRecord> after_by_id(n);
        for (const auto& p : after) after_by_id[p.demand_id] = p;
        for (std::size_t i = 0; i < n; ++i) {
            bool cb = before[i].predicted_label == before[i].true_label;
            bool ca = after_by_id[i].predicted_label == after_by_id[i].true_label;
            if (ca) ++correct_after;
            if (cb && !ca) ++brute_regressed;
            if (!cb && ca) ++brute_repaired;
        }

        RegressionReport rep = regression_diff(before, after);
        CHECK(rep.regressed == brute_regressed);
        CHECK(rep.repaired == brute_repaired);

        // Bookkeeping identity, exact in integers before division.
        CHECK(correct_after - correct_before ==
              static_cast<long long>(rep.repaired) - static_cast<long long>(rep.regressed));
        CHECK(std::abs((rep.acc_after - rep.acc_before) -
                       (static_cast<double>(rep.repaired) - static_cast<double>(rep.regressed)) /
                           static_cast<double>(n)) < 1e-15);

        // Regressed and repaired ids never overlap.
        std::vector<std::uint64_t> overlap;
        std::set_intersection(rep.regressed_ids.begin(), rep.regressed_ids.end(),
                              rep.repaired_ids.begin(), rep.repaired_ids.end(),
                              std::back_inserter(overlap));
        CHECK(overlap.empty());

        // Swapping the arms swaps the transition counts.
        RegressionReport swapped = regression_diff(after, before);
        CHECK(swapped.regressed == rep.repaired);
        CHECK(swapped.repaired == rep.regressed);
        CHECK(swapped.regressed_ids == rep.repaired_ids);
    }
}

TEST_CASE("ordered scores sort ascending") {
    auto preds = arm({1, 1, 1}, {1, 0, 1});
    preds[0].score = 0.9;
    preds[1].score = 0.1;
    preds[2].score = 0.5;
    auto ranked = ordered_scores(preds);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0] == std::pair<std::size_t, double>{0, 0.1});
    CHECK(ranked[1] == std::pair<std::size_t, double>{1, 0.5});
    CHECK(ranked[2] == std::pair<std::size_t, double>{2, 0.9});
}

TEST_CASE("equal scores keep demand-id order") {
    std::vector<PredictionRecord> preds{{9, 0.5, 1, 1}, {3, 0.5, 1, 1}, {7, 0.2, 1, 1}};
    auto records = ordered_records(preds);
    REQUIRE(records.size() == 3);
    CHECK(records[0].demand_id == 7);
    CHECK(records[1].demand_id == 3);
    CHECK(records[2].demand_id == 9);
}

TEST_CASE("ordered scores of random input form a non-decreasing permutation") {
    Rng rng(555);
    std::vector<PredictionRecord> preds;
    std::vector<double> raw;
    for (std::size_t i = 0; i < 1000; ++i) {
        double s = rng.next_unit();
        preds.push_back({i, s, 0, 0});
        raw.push_back(s);
    }
    auto ranked = ordered_scores(preds);
    REQUIRE(ranked.size() == raw.size());
    std::vector<double> got;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        CHECK(ranked[i].first == i);
        if (i > 0) CHECK(ranked[i].second >= ranked[i - 1].second);
        got.push_back(ranked[i].second);
    }
    std::sort(raw.begin(), raw.end());
    CHECK(got == raw);
}

TEST_CASE("degenerate retraining produces no regressions") {
    GeneratorSpec spec;
    spec.n = 200;
    spec.dim = 2;
    spec.center0 = {-1.0, 0.0};
    spec.center1 = {1.0, 0.0};
    spec.spread0 = spec.spread1 = 0.5;
    spec.seed = 44;
    LabeledDataset ds = gen_data(spec);

    // A vanishing learning rate freezes the model, so both arms agree.
    auto outcome = retraining_experiment(ds, {1e-13, 1, 0.0, 9}, {{0.4, 0.4, 0.2}, 9}, 0.5);
    CHECK(outcome.report.regressed == 0);
    CHECK(outcome.report.repaired == 0);
    CHECK(outcome.report.acc_after == outcome.report.acc_before);
}

TEST_CASE("fresh retraining trains the after arm from scratch on parts 1+2") {
    GeneratorSpec spec;
    spec.n = 600;
    spec.dim = 2;
    spec.center0 = {-1.0, 0.0};
    spec.center1 = {1.0, 0.0};
    spec.spread0 = spec.spread1 = 0.5;
    spec.seed = 21;
    LabeledDataset ds = gen_data(spec);

    TrainConfig cfg{0.1, 120, 1e-4, 4};
    SplitSpec split{{0.4, 0.4, 0.2}, 4};
    auto outcome = retraining_experiment(ds, cfg, split, 0.5, /*fresh_retrain=*/true);

    // Reproduce the after arm by hand: a fresh model on part1 followed by
    // part2, in split order.
    auto parts = split_dataset(ds, split);
    LabeledDataset combined = parts[0];
    combined.demands.insert(combined.demands.end(), parts[1].demands.begin(),
                            parts[1].demands.end());
    combined.labels.insert(combined.labels.end(), parts[1].labels.begin(),
                           parts[1].labels.end());
    auto expect = predict_records(train(combined, cfg), parts[2], 0.5);

    REQUIRE(outcome.after.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(outcome.after[i].demand_id == expect[i].demand_id);
        CHECK(outcome.after[i].score == expect[i].score);
    }
}

TEST_CASE("retraining experiment wires the three-part protocol") {
    GeneratorSpec spec;
    spec.n = 1000;
    spec.dim = 2;
    spec.center0 = {-1.0, 0.0};
    spec.center1 = {1.0, 0.0};
    spec.spread0 = spec.spread1 = 0.5;
    spec.seed = 3;
    LabeledDataset ds = gen_data(spec);

    auto outcome = retraining_experiment(ds, {0.1, 300, 1e-4, 1}, {{0.4, 0.4, 0.2}, 1}, 0.5);
    CHECK(outcome.report.n == 200);  // the 20% part
    CHECK(outcome.before.size() == 200);
    CHECK(outcome.after.size() == 200);
    CHECK(outcome.report.regressed_ids.size() == outcome.report.regressed);
    CHECK(outcome.report.repaired_ids.size() == outcome.report.repaired);

    CHECK_THROWS_AS(retraining_experiment(ds, {0.1, 10, 0.0, 1}, {{0.5, 0.5}, 1}, 0.5),
                    std::invalid_argument);
}
