#include "driftboost/model_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "driftboost/boosting.hpp"
#include "driftboost/text.hpp"

namespace driftboost {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "driftboost-model";

json node_to_json(const TreeNode& n) {
    json j;
    j["id"] = n.id;
    if (n.is_leaf) {
        j["kind"] = "leaf";
        j["weight"] = n.weight;
    } else {
        j["kind"] = "internal";
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["left"] = n.left;
        j["right"] = n.right;
    }
    j["G"] = n.stats.g_sum;
    j["H"] = n.stats.h_sum;
    j["count"] = n.stats.count;
    j["score"] = n.stats.score;
    j["origin"] = to_string(n.origin);
    return j;
}

TreeNode node_from_json(const json& j) {
    TreeNode n;
    n.id = j.at("id").get<int>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "leaf") {
        n.is_leaf = true;
        n.weight = j.at("weight").get<double>();
    } else if (kind == "internal") {
        n.is_leaf = false;
        n.feature = j.at("feature").get<int>();
        n.threshold = j.at("threshold").get<double>();
        n.left = j.at("left").get<int>();
        n.right = j.at("right").get<int>();
    } else {
        throw std::runtime_error("unknown node kind: " + kind);
    }
    n.stats.g_sum = j.at("G").get<double>();
    n.stats.h_sum = j.at("H").get<double>();
    n.stats.count = j.at("count").get<std::int64_t>();
    n.stats.score = j.at("score").get<double>();
    n.origin = origin_from_string(j.at("origin").get<std::string>());
    return n;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void save_model(const Ensemble& model, const std::string& path) {
    validate_ensemble(model);
    json j;
    j["format"] = kFormatName;
    j["version"] = kFormatVersion;
    j["base_score"] = model.base_score;
    j["feature_names"] = model.feature_names;
    j["lambda"] = model.constants.l2_reg;
    j["eta"] = model.constants.leaf_penalty;
    j["shrinkage"] = model.constants.shrinkage;
    j["stats_complete"] = model.stats_complete;
    j["provenance"] = model.provenance;
    json trees = json::array();
    for (const Tree& tree : model.trees) {
        json nodes = json::array();
        for (const TreeNode& n : tree.nodes()) nodes.push_back(node_to_json(n));
        trees.push_back(json{{"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    atomic_write(path, j.dump(2) + "\n");
}

Ensemble load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed model file " + path + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormatName)
            throw std::runtime_error("not a model file: " + path);
        if (j.at("version").get<int>() != kFormatVersion)
            throw std::runtime_error("unsupported model version " +
                                     j.at("version").dump() + " in " + path);
        Ensemble model;
        model.base_score = j.at("base_score").get<double>();
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.constants.l2_reg = j.at("lambda").get<double>();
        model.constants.leaf_penalty = j.at("eta").get<double>();
        model.constants.shrinkage = j.at("shrinkage").get<double>();
        model.stats_complete = j.at("stats_complete").get<bool>();
        model.provenance =
            j.at("provenance").get<std::map<std::string, std::string>>();
        for (const json& jt : j.at("trees")) {
            std::vector<TreeNode> nodes;
            for (const json& jn : jt.at("nodes")) nodes.push_back(node_from_json(jn));
            model.trees.emplace_back(std::move(nodes));
        }
        validate_ensemble(model);
        return model;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed model file " + path + ": " + e.what());
    }
}

namespace {

// split gain of an internal node recomputed from its children's stats; zero
// when a side carries no curvature (possible in discounted subtrees with no
// target samples)
double node_gain(const Tree& tree, const TreeNode& n, const TrainConstants& c) {
    const TreeNode& l = tree.node(n.left);
    const TreeNode& r = tree.node(n.right);
    if (l.stats.h_sum + c.l2_reg <= 0.0 || r.stats.h_sum + c.l2_reg <= 0.0) return 0.0;
    return split_gain({l.stats.g_sum, l.stats.h_sum, l.stats.count},
                      {r.stats.g_sum, r.stats.h_sum, r.stats.count}, c.l2_reg,
                      c.leaf_penalty);
}

struct LineReader {
    std::istringstream in;
    std::string line;
    int line_no = 0;
    bool next() {
        if (!std::getline(in, line)) return false;
        ++line_no;
        return true;
    }
};

[[noreturn]] void parse_fail(int line_no, const std::string& why) {
    throw std::runtime_error("dump parse error at line " + std::to_string(line_no) +
                             ": " + why);
}

// key=value pairs separated by `sep`; later keys win, unknown keys are kept
std::map<std::string, std::string> parse_kv(std::string_view text, char sep) {
    std::map<std::string, std::string> out;
    for (auto part : split(text, sep)) {
        auto cleaned = trim(part);
        if (cleaned.empty()) continue;
        auto eq = cleaned.find('=');
        if (eq == std::string_view::npos) return {};
        out[std::string(trim(cleaned.substr(0, eq)))] =
            std::string(trim(cleaned.substr(eq + 1)));
    }
    return out;
}

double require_double(const std::map<std::string, std::string>& kv,
                      const std::string& key, int line_no) {
    auto it = kv.find(key);
    if (it == kv.end()) parse_fail(line_no, "missing field " + key);
    double v;
    if (!parse_double(it->second, v)) parse_fail(line_no, "bad number for " + key);
    return v;
}

long long require_int(const std::map<std::string, std::string>& kv,
                      const std::string& key, int line_no) {
    auto it = kv.find(key);
    if (it == kv.end()) parse_fail(line_no, "missing field " + key);
    long long v;
    if (!parse_int(it->second, v)) parse_fail(line_no, "bad integer for " + key);
    return v;
}

}  // namespace

std::string dump_text(const Ensemble& model) {
    validate_ensemble(model);
    std::string out;
    out += "booster: version=1 trees=" + std::to_string(model.trees.size()) +
           " base_score=" + format_double(model.base_score) +
           " lambda=" + format_double(model.constants.l2_reg) +
           " eta=" + format_double(model.constants.leaf_penalty) +
           " shrinkage=" + format_double(model.constants.shrinkage) +
           " stats=" + (model.stats_complete ? "complete" : "incomplete") + "\n";
    out += "features: ";
    for (std::size_t i = 0; i < model.feature_names.size(); ++i) {
        if (i > 0) out += ',';
        out += model.feature_names[i];
    }
    out += '\n';
    for (const auto& [key, value] : model.provenance)
        out += "meta: " + key + "=" + value + "\n";
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const Tree& tree = model.trees[t];
        out += "tree[" + std::to_string(t) + "]:\n";
        for (const TreeNode& n : tree.nodes()) {
            out += '\t';
            if (n.is_leaf) {
                out += std::to_string(n.id) + ":leaf=" + format_double(n.weight) +
                       ",count=" + std::to_string(n.stats.count);
                if (model.stats_complete)
                    out += ",G=" + format_double(n.stats.g_sum) +
                           ",H=" + format_double(n.stats.h_sum) +
                           ",score=" + format_double(n.stats.score);
                out += ",origin=" + std::string(to_string(n.origin));
            } else {
                out += std::to_string(n.id) + ":[f" + std::to_string(n.feature) +
                       " < " + format_double(n.threshold) + "] left=" +
                       std::to_string(n.left) + " right=" + std::to_string(n.right);
                if (model.stats_complete)
                    out += " gain=" + format_double(node_gain(tree, n, model.constants));
                out += " cover=" + std::to_string(n.stats.count);
                if (model.stats_complete)
                    out += " G=" + format_double(n.stats.g_sum) +
                           " H=" + format_double(n.stats.h_sum) +
                           " score=" + format_double(n.stats.score);
                out += " origin=" + std::string(to_string(n.origin));
            }
            out += '\n';
        }
    }
    return out;
}

Ensemble parse_text(const std::string& text) {
    LineReader reader;
    reader.in.str(text);

    Ensemble model;
    bool saw_booster = false;
    bool saw_features = false;
    std::size_t declared_trees = 0;
    bool any_stats_missing = false;

    std::vector<TreeNode> nodes;
    bool in_tree = false;
    std::size_t tree_index = 0;

    auto flush_tree = [&]() {
        if (!in_tree) return;
        try {
            model.trees.emplace_back(std::move(nodes));
        } catch (const std::exception& e) {
            parse_fail(reader.line_no, e.what());
        }
        nodes.clear();
    };

    while (reader.next()) {
        std::string_view line = trim(reader.line);
        if (line.empty()) continue;

        if (line.rfind("booster:", 0) == 0) {
            auto kv = parse_kv(line.substr(8), ' ');
            if (kv.empty()) parse_fail(reader.line_no, "bad booster header");
            if (require_int(kv, "version", reader.line_no) != kFormatVersion)
                parse_fail(reader.line_no, "unsupported dump version");
            declared_trees =
                static_cast<std::size_t>(require_int(kv, "trees", reader.line_no));
            model.base_score = require_double(kv, "base_score", reader.line_no);
            model.constants.l2_reg = require_double(kv, "lambda", reader.line_no);
            model.constants.leaf_penalty = require_double(kv, "eta", reader.line_no);
            model.constants.shrinkage = require_double(kv, "shrinkage", reader.line_no);
            if (auto it = kv.find("stats"); it != kv.end() && it->second == "incomplete")
                any_stats_missing = true;
            saw_booster = true;
            continue;
        }
        if (line.rfind("features:", 0) == 0) {
            auto body = trim(line.substr(9));
            if (!body.empty())
                for (auto name : split(body, ','))
                    model.feature_names.emplace_back(trim(name));
            saw_features = true;
            continue;
        }
        if (line.rfind("meta:", 0) == 0) {
            auto body = trim(line.substr(5));
            auto eq = body.find('=');
            if (eq == std::string_view::npos)
                parse_fail(reader.line_no, "meta line without key=value");
            model.provenance[std::string(trim(body.substr(0, eq)))] =
                std::string(trim(body.substr(eq + 1)));
            continue;
        }
        if (line.rfind("tree[", 0) == 0) {
            auto close = line.find("]:");
            if (close == std::string_view::npos)
                parse_fail(reader.line_no, "bad tree header");
            long long idx;
            if (!parse_int(line.substr(5, close - 5), idx) ||
                idx != static_cast<long long>(tree_index))
                parse_fail(reader.line_no, "tree headers must be sequential from 0");
            flush_tree();
            in_tree = true;
            ++tree_index;
            continue;
        }

        // node line
        if (!in_tree) parse_fail(reader.line_no, "node line outside a tree block");
        auto colon = line.find(':');
        if (colon == std::string_view::npos) parse_fail(reader.line_no, "missing ':'");
        long long id;
        if (!parse_int(trim(line.substr(0, colon)), id))
            parse_fail(reader.line_no, "bad node id");
        std::string_view rest = line.substr(colon + 1);

        TreeNode n;
        n.id = static_cast<int>(id);
        if (rest.rfind("leaf=", 0) == 0) {
            auto kv = parse_kv(rest.substr(0), ',');
            if (kv.empty()) parse_fail(reader.line_no, "bad leaf line");
            n.is_leaf = true;
            n.weight = require_double(kv, "leaf", reader.line_no);
            if (kv.count("count"))
                n.stats.count = require_int(kv, "count", reader.line_no);
            else
                any_stats_missing = true;
            if (kv.count("G") && kv.count("H")) {
                n.stats.g_sum = require_double(kv, "G", reader.line_no);
                n.stats.h_sum = require_double(kv, "H", reader.line_no);
                if (kv.count("score"))
                    n.stats.score = require_double(kv, "score", reader.line_no);
                else
                    any_stats_missing = true;
            } else {
                any_stats_missing = true;
            }
            if (kv.count("origin")) n.origin = origin_from_string(kv.at("origin"));
        } else if (rest.size() > 2 && rest[0] == '[' && rest[1] == 'f') {
            auto close = rest.find(']');
            if (close == std::string_view::npos)
                parse_fail(reader.line_no, "unterminated split rule");
            auto rule = rest.substr(2, close - 2);
            auto lt = rule.find('<');
            if (lt == std::string_view::npos)
                parse_fail(reader.line_no, "split rule without '<'");
            long long feature;
            if (!parse_int(trim(rule.substr(0, lt)), feature))
                parse_fail(reader.line_no, "bad feature index");
            double threshold;
            if (!parse_double(trim(rule.substr(lt + 1)), threshold))
                parse_fail(reader.line_no, "bad threshold");
            auto kv = parse_kv(rest.substr(close + 1), ' ');
            if (kv.empty()) parse_fail(reader.line_no, "bad internal node line");
            n.is_leaf = false;
            n.feature = static_cast<int>(feature);
            n.threshold = threshold;
            n.left = static_cast<int>(require_int(kv, "left", reader.line_no));
            n.right = static_cast<int>(require_int(kv, "right", reader.line_no));
            if (kv.count("cover"))
                n.stats.count = require_int(kv, "cover", reader.line_no);
            else
                any_stats_missing = true;
            if (kv.count("G") && kv.count("H")) {
                n.stats.g_sum = require_double(kv, "G", reader.line_no);
                n.stats.h_sum = require_double(kv, "H", reader.line_no);
                if (kv.count("score"))
                    n.stats.score = require_double(kv, "score", reader.line_no);
                else
                    any_stats_missing = true;
            } else {
                any_stats_missing = true;
            }
            if (kv.count("origin")) n.origin = origin_from_string(kv.at("origin"));
        } else {
            parse_fail(reader.line_no, "unrecognized node line");
        }
        for (const TreeNode& existing : nodes)
            if (existing.id == n.id)
                parse_fail(reader.line_no, "duplicate node_id " + std::to_string(n.id));
        nodes.push_back(std::move(n));
    }
    flush_tree();

    if (!saw_booster) throw std::runtime_error("dump parse error: missing booster header");
    if (!saw_features) throw std::runtime_error("dump parse error: missing features line");
    if (model.trees.size() != declared_trees)
        throw std::runtime_error("dump parse error: booster declares " +
                                 std::to_string(declared_trees) + " trees, found " +
                                 std::to_string(model.trees.size()));
    model.stats_complete = !any_stats_missing;
    validate_ensemble(model);
    return model;
}

}  // namespace driftboost
