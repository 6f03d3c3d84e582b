#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

#include "driftboost/model_io.hpp"

using namespace driftboost;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "driftboost-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("empty ensemble round-trips through both formats") {
    Ensemble empty;
    auto path = temp_path("empty.json");
    save_model(empty, path.string());
    CHECK(testutil::ensembles_equal(empty, load_model(path.string())));
    CHECK(testutil::ensembles_equal(empty, parse_text(dump_text(empty))));
}

TEST_CASE("random models round-trip through save/load") {
    std::mt19937_64 rng(1001);
    auto path = temp_path("roundtrip.json");
    std::uniform_real_distribution<double> value(-12.0, 12.0);
    for (int rep = 0; rep < 25; ++rep) {
        Ensemble model = testutil::random_model(rng);
        save_model(model, path.string());
        Ensemble back = load_model(path.string());
        CHECK(testutil::ensembles_equal(model, back));
        for (int probe = 0; probe < 40; ++probe) {
            std::vector<double> x(model.feature_count());
            for (double& v : x) v = value(rng);
            CHECK(predict_margin(model, x) == predict_margin(back, x));
        }
    }
}

TEST_CASE("a 50-tree model reloads with exactly equal margins") {
    std::mt19937_64 rng(1050);
    Dataset data = testutil::random_dataset(rng, 300, 4);
    TrainConfig cfg;
    cfg.num_trees = 50;
    cfg.max_depth = 4;
    Ensemble model = train(data, cfg);
    auto path = temp_path("fifty.json");
    save_model(model, path.string());
    Ensemble back = load_model(path.string());
    std::uniform_real_distribution<double> value(-12.0, 12.0);
    for (int probe = 0; probe < 1000; ++probe) {
        std::vector<double> x(model.feature_count());
        for (double& v : x) v = value(rng);
        CHECK(predict_margin(model, x) == predict_margin(back, x));
    }
}

TEST_CASE("random models round-trip through dump_text/parse_text") {
    std::mt19937_64 rng(1002);
    for (int rep = 0; rep < 25; ++rep) {
        Ensemble model = testutil::random_model(rng);
        Ensemble back = parse_text(dump_text(model));
        CHECK(testutil::ensembles_equal(model, back));
    }
}

TEST_CASE("serialization is byte-stable") {
    std::mt19937_64 rng(1003);
    Ensemble model = testutil::random_model(rng);
    auto a = temp_path("stable_a.json");
    auto b = temp_path("stable_b.json");
    save_model(model, a.string());
    save_model(model, b.string());
    CHECK(slurp(a) == slurp(b));
    CHECK(dump_text(model) == dump_text(model));
}

TEST_CASE("a production-style node line parses to the right split") {
    const std::string text =
        "booster: version=1 trees=1 base_score=0 lambda=1 eta=0 shrinkage=0.1 "
        "stats=complete\n"
        "features: f0,f1,f2,f3,f4,f5\n"
        "tree[0]:\n"
        "\t0:[f5 < 140689.5] left=1 right=2 gain=542.19208 cover=62400 G=12 H=60 "
        "score=-0.19672131147540983 origin=source\n"
        "\t1:leaf=-0.018,count=61119,G=11,H=55,score=-0.19642857142857142,"
        "origin=source\n"
        "\t2:leaf=0.02,count=1281,G=1,H=5,score=-0.16666666666666666,origin=source\n";
    Ensemble model = parse_text(text);
    REQUIRE(model.trees.size() == 1);
    const TreeNode& root = model.trees[0].root();
    CHECK_FALSE(root.is_leaf);
    CHECK(root.feature == 5);
    CHECK(root.threshold == 140689.5);
    CHECK(root.left == 1);
    CHECK(root.right == 2);
    CHECK(root.stats.count == 62400);
    CHECK(model.stats_complete);
}

TEST_CASE("single-leaf tree dumps to a header plus one node line") {
    Ensemble model;
    model.feature_names = {"f0"};
    TreeNode leaf;
    leaf.is_leaf = true;
    leaf.weight = 0.05;
    leaf.stats = {-1.0, 1.0, 4, 0.5};
    model.trees.emplace_back(std::vector<TreeNode>{leaf});
    const std::string text = dump_text(model);
    // booster + features + tree header + one leaf line
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("tree[0]:") != std::string::npos);
    CHECK(text.find("0:leaf=0.05,count=4") != std::string::npos);
}

TEST_CASE("imports missing G/H are flagged stats-incomplete") {
    const std::string text =
        "booster: version=1 trees=1 base_score=0 lambda=1 eta=0 shrinkage=0.1 "
        "stats=complete\n"
        "features: f0\n"
        "tree[0]:\n"
        "\t0:leaf=0.1,count=10\n";
    Ensemble model = parse_text(text);
    CHECK_FALSE(model.stats_complete);
    // and the flag round-trips through the canonical format
    auto path = temp_path("incomplete.json");
    save_model(model, path.string());
    CHECK_FALSE(load_model(path.string()).stats_complete);
    CHECK(testutil::ensembles_equal(model, parse_text(dump_text(model))));
}

TEST_CASE("parse_text rejects malformed input with line numbers") {
    const std::string dup =
        "booster: version=1 trees=1 base_score=0 lambda=1 eta=0 shrinkage=0.1\n"
        "features: f0\n"
        "tree[0]:\n"
        "\t0:leaf=0.1,count=1,G=0,H=0.25,score=0\n"
        "\t0:leaf=0.2,count=1,G=0,H=0.25,score=0\n";
    CHECK_THROWS_WITH_AS(parse_text(dup), doctest::Contains("line 5"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_text(dup), doctest::Contains("duplicate node_id"),
                         std::runtime_error);

    CHECK_THROWS_WITH_AS(parse_text("features: f0\n"), doctest::Contains("booster"),
                         std::runtime_error);

    const std::string bad_version =
        "booster: version=9 trees=0 base_score=0 lambda=1 eta=0 shrinkage=0.1\n"
        "features: f0\n";
    CHECK_THROWS_WITH_AS(parse_text(bad_version), doctest::Contains("version"),
                         std::runtime_error);

    const std::string garbage =
        "booster: version=1 trees=1 base_score=0 lambda=1 eta=0 shrinkage=0.1\n"
        "features: f0\n"
        "tree[0]:\n"
        "\t0:what\n";
    CHECK_THROWS_WITH_AS(parse_text(garbage), doctest::Contains("line 4"),
                         std::runtime_error);
}

TEST_CASE("load rejects files that violate tree invariants") {
    // internal node referencing a missing child
    const std::string broken =
        "booster: version=1 trees=1 base_score=0 lambda=1 eta=0 shrinkage=0.1\n"
        "features: f0\n"
        "tree[0]:\n"
        "\t0:[f0 < 1] left=1 right=2 cover=2 G=0 H=0.5 score=0\n"
        "\t1:leaf=0.1,count=1,G=0,H=0.25,score=0\n";
    CHECK_THROWS_WITH_AS(parse_text(broken), doctest::Contains("missing child"),
                         std::runtime_error);

    // score inconsistent with G/H
    const std::string bad_score =
        "booster: version=1 trees=1 base_score=0 lambda=1 eta=0 shrinkage=0.1\n"
        "features: f0\n"
        "tree[0]:\n"
        "\t0:leaf=0.1,count=1,G=-1,H=1,score=0.9\n";
    CHECK_THROWS_WITH_AS(parse_text(bad_score), doctest::Contains("score"),
                         std::runtime_error);

    // counts that do not add up
    const std::string bad_counts =
        "booster: version=1 trees=1 base_score=0 lambda=1 eta=0 shrinkage=0.1\n"
        "features: f0\n"
        "tree[0]:\n"
        "\t0:[f0 < 1] left=1 right=2 cover=5 G=0 H=0.5 score=0\n"
        "\t1:leaf=0.1,count=1,G=0,H=0.25,score=0\n"
        "\t2:leaf=0.1,count=1,G=0,H=0.25,score=0\n";
    CHECK_THROWS_WITH_AS(parse_text(bad_counts), doctest::Contains("counts"),
                         std::runtime_error);
}

TEST_CASE("load_model rejects wrong versions and formats") {
    auto path = temp_path("badversion.json");
    {
        std::ofstream out(path);
        out << R"({"format":"driftboost-model","version":99})" << "\n";
    }
    CHECK_THROWS_WITH_AS(load_model(path.string()), doctest::Contains("version"),
                         std::runtime_error);
    {
        std::ofstream out(path);
        out << "not json at all";
    }
    CHECK_THROWS_WITH_AS(load_model(path.string()), doctest::Contains("malformed"),
                         std::runtime_error);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), std::runtime_error);
}
