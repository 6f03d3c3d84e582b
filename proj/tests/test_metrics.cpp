#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

#include "driftboost/metrics.hpp"
#include "driftboost/synth.hpp"

using namespace driftboost;

TEST_CASE("auc on separated and tied inputs") {
    std::vector<double> separated{0.1, 0.2, 0.8, 0.9};
    std::vector<int> labels{0, 0, 1, 1};
    CHECK(auc(separated, labels) == 1.0);

    std::vector<double> inverted{0.9, 0.8, 0.2, 0.1};
    CHECK(auc(inverted, labels) == 0.0);

    std::vector<double> tied{0.5, 0.5, 0.5, 0.5};
    CHECK(auc(tied, labels) == 0.5);

    std::vector<int> one_class{1, 1, 1, 1};
    CHECK_THROWS_AS(auc(tied, one_class), std::invalid_argument);
}

TEST_CASE("auc matches the pairwise oracle, including heavy ties") {
    std::mt19937_64 rng(314);
    std::uniform_int_distribution<std::size_t> n_dist(2, 400);
    std::uniform_int_distribution<int> level_dist(1, 8);
    std::bernoulli_distribution coin(0.4);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = n_dist(rng);
        // quantized scores force ties
        std::uniform_int_distribution<int> quant(0, level_dist(rng));
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = quant(rng) / 4.0;
            labels[i] = coin(rng) ? 1 : 0;
        }
        labels[0] = 0;
        labels[n - 1] = 1;
        CHECK(std::fabs(auc(scores, labels) - testutil::pairwise_auc(scores, labels)) <
              1e-12);
    }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> scores(300);
    std::vector<int> labels(300);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        labels[i] = coin(rng) ? 1 : 0;
        scores[i] = noise(rng) + labels[i];
    }
    std::vector<double> warped(scores.size());
    std::transform(scores.begin(), scores.end(), warped.begin(),
                   [](double s) { return std::exp(0.3 * s) + std::atan(s); });
    CHECK(auc(scores, labels) == doctest::Approx(auc(warped, labels)).epsilon(1e-12));
}

TEST_CASE("top_recall basic contract") {
    std::vector<double> scores{0.9, 0.8, 0.3, 0.2, 0.1};
    std::vector<int> labels{1, 1, 0, 0, 0};
    CHECK(top_recall(scores, labels, 0.4) == 1.0);
    CHECK(top_recall(scores, labels, 1.0) == 1.0);
    CHECK(top_recall(scores, labels, 0.2) == 0.5);

    std::vector<int> none{0, 0, 0, 0, 0};
    CHECK_THROWS_AS(top_recall(scores, none, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(top_recall(scores, labels, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(top_recall(scores, labels, 1.5), std::invalid_argument);
}

TEST_CASE("top_recall at one-basis-point on ten thousand rows keeps k=1") {
    std::vector<double> scores(10000, 0.0);
    std::vector<int> labels(10000, 0);
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = -static_cast<double>(i);
    // v1: the single top-scored row is positive
    labels[0] = 1;
    labels[500] = 1;
    CHECK(top_recall(scores, labels, 1e-4) == 0.5);
    // v2: the top row is negative
    labels[0] = 0;
    CHECK(top_recall(scores, labels, 1e-4) == 0.0);
}

TEST_CASE("top_recall is non-decreasing in the fraction") {
    std::mt19937_64 rng(123);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::bernoulli_distribution coin(0.3);
    std::vector<double> scores(500);
    std::vector<int> labels(500);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        labels[i] = coin(rng) ? 1 : 0;
        scores[i] = noise(rng) + 0.5 * labels[i];
    }
    labels[0] = 1;
    double prev = 0.0;
    for (double fraction : {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0}) {
        const double r = top_recall(scores, labels, fraction);
        CHECK(r >= prev);
        prev = r;
    }
    CHECK(prev == 1.0);
}

TEST_CASE("top_recall cutoff breaks ties by original index") {
    std::vector<double> scores{0.5, 0.5, 0.5, 0.5};
    std::vector<int> labels{1, 0, 0, 1};
    // k=1 picks index 0 deterministically
    CHECK(top_recall(scores, labels, 0.25) == 0.5);
}

TEST_CASE("information value separates informative from shuffled features") {
    std::mt19937_64 rng(2718);
    // perfectly separating feature with two bins
    std::vector<double> values(10000);
    std::vector<int> labels(10000);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<double>(i);
        labels[i] = i >= 5000 ? 1 : 0;
    }
    CHECK(information_value(values, labels, 2) > 5.0);

    // labels shuffled: IV collapses toward zero
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 shuffle_rng(seed);
        std::vector<int> shuffled = labels;
        std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);
        CHECK(information_value(values, shuffled, 10) < 0.02);
    }

    // constant feature carries no information
    std::vector<double> constant(10000, 3.25);
    CHECK(information_value(constant, labels, 10) == 0.0);

    std::vector<int> one_class(10000, 1);
    CHECK_THROWS_AS(information_value(values, one_class, 10), std::invalid_argument);
    CHECK_THROWS_AS(information_value(values, labels, 1), std::invalid_argument);
    (void)rng;
}

TEST_CASE("information value is invariant under monotone transforms of distinct values") {
    std::mt19937_64 rng(1618);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> values(2000);
    std::vector<int> labels(2000);
    for (std::size_t i = 0; i < values.size(); ++i) {
        labels[i] = coin(rng) ? 1 : 0;
        values[i] = noise(rng) + 0.8 * labels[i];
    }
    std::vector<double> warped(values.size());
    std::transform(values.begin(), values.end(), warped.begin(),
                   [](double v) { return std::exp(v); });
    CHECK(information_value(values, labels) == information_value(warped, labels));
}

TEST_CASE("drift report on identical domains has zero rank differences") {
    GeneratorSpec gen;
    auto [source, target] = synth_domain_pair(gen, DriftSpec::identity(5), 2000, 10);
    DriftReport report = drift_report(source, source);
    REQUIRE(report.rows.size() == gen.feature_count);
    std::vector<int> ranks;
    for (const auto& row : report.rows) {
        CHECK(row.iv_s == row.iv_t);
        CHECK(row.rank_diff == 0);
        ranks.push_back(row.rank_s);
    }
    // ranks are a permutation of 1..d, sorted ascending in the report
    for (std::size_t i = 0; i < ranks.size(); ++i)
        CHECK(ranks[i] == static_cast<int>(i) + 1);
}

TEST_CASE("drift report sees scale drift in the deciles but not the IV rank") {
    GeneratorSpec gen;
    DriftSpec drift;
    drift.mode = DriftMode::scale;
    drift.scale_params[0] = {2.0, 100.0};
    drift.seed = 77;
    auto [source, target] = synth_domain_pair(gen, drift, 30000, 30000);
    DriftReport report = drift_report(source, target);
    for (const auto& row : report.rows) {
        if (row.name != "f0") continue;
        for (int q = 0; q < 9; ++q)
            CHECK(row.deciles_t[q] ==
                  doctest::Approx(2.0 * row.deciles_s[q] + 100.0).epsilon(0.15));
    }
}

TEST_CASE("efficacy loss pushes the feature down the IV ranking") {
    GeneratorSpec gen;
    DriftSpec drift;
    drift.mode = DriftMode::efficacy_loss;
    drift.noise_levels[0] = 0.95;
    drift.seed = 31;
    auto [source, target] = synth_domain_pair(gen, drift, 50000, 50000);
    DriftReport report = drift_report(source, target);
    for (const auto& row : report.rows)
        if (row.name == "f0") CHECK(row.rank_diff > 0);
}

TEST_CASE("drift report requires a shared feature space") {
    GeneratorSpec small;
    small.feature_count = 3;
    small.informative = {0};
    small.coefficients = {2.0};
    GeneratorSpec big;
    auto [a_src, a_tgt] = synth_domain_pair(small, DriftSpec::identity(1), 100, 100);
    auto [b_src, b_tgt] = synth_domain_pair(big, DriftSpec::identity(2), 100, 100);
    CHECK_THROWS_AS(drift_report(a_src, b_src), std::invalid_argument);
}
