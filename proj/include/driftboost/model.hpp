#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace driftboost {

// How a node ended up in its current form: trained as-is, statistics and
// structure refreshed on new data, weight scaled down as low-confidence, or
// collapsed from an internal node into a leaf.
enum class NodeOrigin { source, revised, discounted, pruned };

const char* to_string(NodeOrigin origin);
NodeOrigin origin_from_string(std::string_view text);

struct NodeStats {
    double g_sum = 0.0;
    double h_sum = 0.0;
    std::int64_t count = 0;
    double score = 0.0;  // -g_sum / (h_sum + lambda), before shrinkage
};

struct TreeNode {
    int id = 0;
    bool is_leaf = true;
    // internal nodes: route left iff x[feature] < threshold
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    // leaves: post-shrinkage margin contribution
    double weight = 0.0;
    NodeStats stats;
    NodeOrigin origin = NodeOrigin::source;
};

// Binary decision tree. Nodes are kept sorted by id and the root always has
// id 0. Ids are stable under revision, so a tree that lost branches keeps
// gaps in its id sequence.
class Tree {
public:
    Tree() = default;
    explicit Tree(std::vector<TreeNode> nodes);

    bool empty() const { return nodes_.empty(); }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    bool has_node(int id) const;
    const TreeNode& node(int id) const;
    TreeNode& node(int id);
    const TreeNode& root() const { return node(0); }

    // Keeps the sorted-by-id order; duplicate ids are rejected.
    void add_node(TreeNode n);

    // Leaf id the vector routes to.
    int route(std::span<const double> x) const;
    double leaf_value(std::span<const double> x) const;

    // Longest root-to-leaf path, root at depth 0.
    int depth() const;

private:
    std::vector<TreeNode> nodes_;
};

struct TrainConstants {
    double l2_reg = 1.0;
    double leaf_penalty = 0.0;
    double shrinkage = 0.1;
};

bool operator==(const TrainConstants& a, const TrainConstants& b);

// Additive margin model: base_score plus one leaf weight per tree.
struct Ensemble {
    std::vector<Tree> trees;
    double base_score = 0.0;
    std::vector<std::string> feature_names;
    TrainConstants constants;
    // False for models imported from dumps that lack per-node G/H; threshold
    // revision by fractile and weight discounting refuse to run on those.
    bool stats_complete = true;
    std::map<std::string, std::string> provenance;

    std::size_t feature_count() const { return feature_names.size(); }
};

// Structural and statistical invariants: rooted binary tree with exactly one
// parent per node, counts that add up, feature indices in range and, when
// stats are complete, score == -G/(H+lambda) within 1e-9. Throws
// std::runtime_error with a description on the first violation.
void validate_tree(const Tree& tree, std::size_t feature_count,
                   const TrainConstants& constants, bool stats_complete);
void validate_ensemble(const Ensemble& model);

}  // namespace driftboost
