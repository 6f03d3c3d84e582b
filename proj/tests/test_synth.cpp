#include <algorithm>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

#include "driftboost/metrics.hpp"
#include "driftboost/synth.hpp"

using namespace driftboost;

namespace {

double sample_quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return quantile_nearest_rank(values, q);
}

}  // namespace

TEST_CASE("scale drift shifts target quantiles by the affine map") {
    GeneratorSpec gen;
    DriftSpec drift;
    drift.mode = DriftMode::scale;
    drift.scale_params[0] = {2.0, 100.0};
    drift.seed = 11;
    auto [source, target] = synth_domain_pair(gen, drift, 20000, 20000);
    for (int dec = 1; dec <= 9; ++dec) {
        const double qs = sample_quantile(source.column(0), dec / 10.0);
        const double qt = sample_quantile(target.column(0), dec / 10.0);
        CHECK(qt == doctest::Approx(2.0 * qs + 100.0).epsilon(0.2));
    }
    // undrifted feature stays put
    const double med_s = sample_quantile(source.column(1), 0.5);
    const double med_t = sample_quantile(target.column(1), 0.5);
    CHECK(std::fabs(med_s - med_t) < 0.05);
}

TEST_CASE("label drift with rate zero equals the undrifted label rule") {
    GeneratorSpec gen;
    DriftSpec no_flips;
    no_flips.mode = DriftMode::label_drift;
    no_flips.label_flip_rate = 0.0;
    no_flips.seed = 3;
    auto [s1, t1] = synth_domain_pair(gen, no_flips, 500, 500);

    DriftSpec identity = DriftSpec::identity(3);
    auto [s2, t2] = synth_domain_pair(gen, identity, 500, 500);

    REQUIRE(t1.row_count() == t2.row_count());
    for (std::size_t r = 0; r < t1.row_count(); ++r) {
        CHECK(t1.label(r) == t2.label(r));
        for (std::size_t c = 0; c < t1.feature_count(); ++c)
            CHECK(t1.feature(r, c) == t2.feature(r, c));
    }
}

TEST_CASE("label drift moves the positive rate toward one half") {
    GeneratorSpec gen;
    gen.intercept = -2.5;
    DriftSpec flips;
    flips.mode = DriftMode::label_drift;
    flips.label_flip_rate = 0.4;
    flips.seed = 9;
    auto [source, target] = synth_domain_pair(gen, flips, 20000, 20000);
    CHECK(std::fabs(target.bad_rate() - source.bad_rate()) > 0.05);
}

TEST_CASE("efficacy loss lowers the information value of the feature") {
    GeneratorSpec gen;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        DriftSpec drift;
        drift.mode = DriftMode::efficacy_loss;
        drift.noise_levels[1] = 0.9;
        drift.seed = seed;
        auto [source, target] = synth_domain_pair(gen, drift, 10000, 10000);
        const double iv_source = information_value(source.column(1), source.labels());
        const double iv_target = information_value(target.column(1), target.labels());
        CHECK(iv_target < iv_source);
    }
}

TEST_CASE("identity drift gives matching decile profiles at 50k rows") {
    GeneratorSpec gen;
    auto [source, target] = synth_domain_pair(gen, DriftSpec::identity(17), 50000, 50000);
    for (std::size_t f = 0; f < gen.feature_count; ++f)
        for (int dec = 1; dec <= 9; ++dec) {
            const double qs = sample_quantile(source.column(f), dec / 10.0);
            const double qt = sample_quantile(target.column(f), dec / 10.0);
            CHECK(std::fabs(qs - qt) < 0.05);
        }
}

TEST_CASE("shape drift produces a mixture marginal") {
    GeneratorSpec gen;
    DriftSpec drift;
    drift.mode = DriftMode::shape;
    drift.shape_params[3] = {0.5, {1.0, -4.0}, {1.0, 4.0}};
    drift.seed = 21;
    auto [source, target] = synth_domain_pair(gen, drift, 20000, 20000);
    // the two affine components push mass away from the center
    auto col = target.column(3);
    const double near_zero =
        static_cast<double>(std::count_if(col.begin(), col.end(),
                                          [](double v) { return std::fabs(v) < 1.0; })) /
        static_cast<double>(col.size());
    auto col_s = source.column(3);
    const double near_zero_s =
        static_cast<double>(std::count_if(col_s.begin(), col_s.end(),
                                          [](double v) { return std::fabs(v) < 1.0; })) /
        static_cast<double>(col_s.size());
    CHECK(near_zero < near_zero_s * 0.5);
}

TEST_CASE("drift spec validation") {
    GeneratorSpec gen;
    DriftSpec bad_scale;
    bad_scale.scale_params[0] = {0.0, 1.0};
    CHECK_THROWS_AS(synth_domain_pair(gen, bad_scale, 10, 10), std::invalid_argument);

    DriftSpec bad_flip;
    bad_flip.label_flip_rate = 0.5;
    CHECK_THROWS_AS(synth_domain_pair(gen, bad_flip, 10, 10), std::invalid_argument);

    DriftSpec ok = DriftSpec::identity();
    CHECK_THROWS_AS(synth_domain_pair(gen, ok, 0, 10), std::invalid_argument);

    GeneratorSpec bad_gen;
    bad_gen.informative = {12};
    bad_gen.coefficients = {1.0};
    CHECK_THROWS_AS(synth_domain_pair(bad_gen, ok, 10, 10), std::invalid_argument);
}
