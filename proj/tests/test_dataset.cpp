#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

#include "driftboost/dataset.hpp"

using namespace driftboost;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "driftboost-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

}  // namespace

TEST_CASE("load_csv parses a small file") {
    auto path = temp_file("small.csv");
    write_file(path, "f0,f1,label\n1.5,2,0\n-3,4.25,1\n0,0,0\n");
    Dataset data = load_csv(path.string());
    CHECK(data.row_count() == 3);
    CHECK(data.feature_count() == 2);
    CHECK(data.feature(0, 0) == 1.5);
    CHECK(data.feature(1, 1) == 4.25);
    CHECK(data.label(1) == 1);
    CHECK(data.feature_names() == std::vector<std::string>{"f0", "f1"});
}

TEST_CASE("load_csv finds the label column anywhere in the header") {
    auto path = temp_file("midlabel.csv");
    write_file(path, "a,y,b\n1,0,2\n3,1,4\n");
    Dataset data = load_csv(path.string(), "y");
    CHECK(data.feature_names() == std::vector<std::string>{"a", "b"});
    CHECK(data.feature(1, 1) == 4.0);
    CHECK(data.label(1) == 1);
}

TEST_CASE("load_csv error paths") {
    CHECK_THROWS_WITH_AS(load_csv("/nonexistent/nope.csv"),
                         doctest::Contains("cannot open"), std::runtime_error);

    auto bad_label = temp_file("badlabel.csv");
    write_file(bad_label, "f0,label\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(bad_label.string()),
                         doctest::Contains("label not binary"), std::runtime_error);

    auto nan_cell = temp_file("nancell.csv");
    write_file(nan_cell, "f0,label\nNaN,1\n");
    CHECK_THROWS_WITH_AS(load_csv(nan_cell.string()),
                         doctest::Contains("non-finite feature"), std::runtime_error);

    auto not_numeric = temp_file("notnum.csv");
    write_file(not_numeric, "f0,label\nabc,1\n");
    CHECK_THROWS_WITH_AS(load_csv(not_numeric.string()),
                         doctest::Contains("non-numeric"), std::runtime_error);

    auto empty = temp_file("empty.csv");
    write_file(empty, "f0,label\n");
    CHECK_THROWS_WITH_AS(load_csv(empty.string()), doctest::Contains("empty dataset"),
                         std::runtime_error);

    auto no_label = temp_file("nolabel.csv");
    write_file(no_label, "f0,f1\n1,2\n");
    CHECK_THROWS_AS(load_csv(no_label.string()), std::runtime_error);
}

TEST_CASE("dataset constructor enforces invariants") {
    CHECK_THROWS_AS(Dataset({}, {}, {"f0"}), std::invalid_argument);
    CHECK_THROWS_AS(Dataset({1.0}, {2}, {"f0"}), std::invalid_argument);
    CHECK_THROWS_AS(Dataset({1.0, 2.0}, {0, 1}, {"f0", "f0"}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Dataset({inf}, {0}, {"f0"}), std::invalid_argument);
}

TEST_CASE("write_csv then load_csv reproduces the dataset exactly") {
    std::mt19937_64 rng(42);
    Dataset data = testutil::random_dataset(rng, 37, 4);
    auto path = temp_file("roundtrip.csv");
    write_csv(data, path.string());
    Dataset back = load_csv(path.string());
    REQUIRE(back.row_count() == data.row_count());
    REQUIRE(back.feature_count() == data.feature_count());
    CHECK(back.feature_names() == data.feature_names());
    for (std::size_t r = 0; r < data.row_count(); ++r) {
        CHECK(back.label(r) == data.label(r));
        for (std::size_t c = 0; c < data.feature_count(); ++c)
            CHECK(back.feature(r, c) == data.feature(r, c));
    }
}

namespace {

Dataset imbalance_fixture(std::size_t negatives, std::size_t positives) {
    std::vector<double> feats;
    std::vector<int> labels;
    for (std::size_t i = 0; i < negatives + positives; ++i) {
        feats.push_back(static_cast<double>(i));
        labels.push_back(i < positives ? 1 : 0);
    }
    return Dataset(std::move(feats), std::move(labels), {"f0"});
}

}  // namespace

TEST_CASE("negative_sample keeps a dataset already at the target rate") {
    Dataset data = imbalance_fixture(97, 3);
    Dataset out = negative_sample(data, 0.03, 1);
    CHECK(out.row_count() == 100);
    CHECK(out.positive_count() == 3);
}

TEST_CASE("negative_sample downsamples to the closest rate above target") {
    Dataset data = imbalance_fixture(9997, 3);
    Dataset out = negative_sample(data, 0.03, 1);
    CHECK(out.positive_count() == 3);
    CHECK(out.row_count() == 100);  // 3 positives + 97 negatives
    CHECK(out.bad_rate() >= 0.03);
}

TEST_CASE("negative_sample is deterministic and keeps every positive") {
    Dataset data = imbalance_fixture(500, 20);
    Dataset a = negative_sample(data, 0.2, 7);
    Dataset b = negative_sample(data, 0.2, 7);
    REQUIRE(a.row_count() == b.row_count());
    for (std::size_t r = 0; r < a.row_count(); ++r)
        CHECK(a.feature(r, 0) == b.feature(r, 0));
    CHECK(a.positive_count() == 20);
    CHECK(a.bad_rate() >= 0.2);

    Dataset c = negative_sample(data, 0.2, 8);
    bool same = a.row_count() == c.row_count();
    if (same)
        for (std::size_t r = 0; r < a.row_count(); ++r)
            same = same && a.feature(r, 0) == c.feature(r, 0);
    CHECK_FALSE(same);
}

TEST_CASE("negative_sample output rows are a subset of the input in order") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        Dataset data = testutil::random_dataset(rng, 120, 2);
        const double target = std::min(1.0, data.bad_rate() * 1.5);
        Dataset out = negative_sample(data, target, rep);
        CHECK(out.bad_rate() >= target);
        CHECK(out.positive_count() == data.positive_count());
        // order-preserving subset: every output row appears in the input at an
        // increasing position
        std::size_t cursor = 0;
        for (std::size_t r = 0; r < out.row_count(); ++r) {
            bool found = false;
            for (; cursor < data.row_count(); ++cursor) {
                if (data.feature(cursor, 0) == out.feature(r, 0) &&
                    data.feature(cursor, 1) == out.feature(r, 1) &&
                    data.label(cursor) == out.label(r)) {
                    found = true;
                    ++cursor;
                    break;
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("negative_sample error paths") {
    Dataset data = imbalance_fixture(50, 50);
    CHECK_THROWS_WITH_AS(negative_sample(data, 0.1, 1), doctest::Contains("below current"),
                         std::invalid_argument);
    Dataset all_neg = imbalance_fixture(10, 1);
    CHECK_THROWS_AS(negative_sample(all_neg, 0.0, 1), std::invalid_argument);

    std::vector<double> feats{1.0, 2.0};
    std::vector<int> labels{0, 0};
    Dataset no_pos(std::move(feats), std::move(labels), {"f0"});
    CHECK_THROWS_WITH_AS(negative_sample(no_pos, 0.5, 1),
                         doctest::Contains("at least one positive"), std::invalid_argument);
}
