#include "driftboost/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftboost {

const char* to_string(NodeOrigin origin) {
    switch (origin) {
        case NodeOrigin::source: return "source";
        case NodeOrigin::revised: return "revised";
        case NodeOrigin::discounted: return "discounted";
        case NodeOrigin::pruned: return "pruned";
    }
    return "source";
}

NodeOrigin origin_from_string(std::string_view text) {
    if (text == "source") return NodeOrigin::source;
    if (text == "revised") return NodeOrigin::revised;
    if (text == "discounted") return NodeOrigin::discounted;
    if (text == "pruned") return NodeOrigin::pruned;
    throw std::runtime_error("unknown node origin: " + std::string(text));
}

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const TreeNode& a, const TreeNode& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (nodes_[i].id == nodes_[i - 1].id)
            throw std::runtime_error("duplicate node_id " + std::to_string(nodes_[i].id));
}

namespace {
std::size_t find_index(const std::vector<TreeNode>& nodes, int id) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const TreeNode& n, int v) { return n.id < v; });
    if (it == nodes.end() || it->id != id)
        throw std::runtime_error("missing node " + std::to_string(id));
    return static_cast<std::size_t>(it - nodes.begin());
}
}  // namespace

bool Tree::has_node(int id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const TreeNode& n, int v) { return n.id < v; });
    return it != nodes_.end() && it->id == id;
}

const TreeNode& Tree::node(int id) const { return nodes_[find_index(nodes_, id)]; }
TreeNode& Tree::node(int id) { return nodes_[find_index(nodes_, id)]; }

void Tree::add_node(TreeNode n) {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n.id,
                               [](const TreeNode& a, int v) { return a.id < v; });
    if (it != nodes_.end() && it->id == n.id)
        throw std::runtime_error("duplicate node_id " + std::to_string(n.id));
    nodes_.insert(it, std::move(n));
}

int Tree::route(std::span<const double> x) const {
    const TreeNode* n = &root();
    while (!n->is_leaf) {
        int next = x[static_cast<std::size_t>(n->feature)] < n->threshold ? n->left
                                                                          : n->right;
        n = &node(next);
    }
    return n->id;
}

double Tree::leaf_value(std::span<const double> x) const {
    return node(route(x)).weight;
}

int Tree::depth() const {
    if (nodes_.empty()) return 0;
    int max_depth = 0;
    // iterative DFS over (id, depth)
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        const TreeNode& n = node(id);
        if (n.is_leaf) {
            max_depth = std::max(max_depth, d);
        } else {
            stack.emplace_back(n.left, d + 1);
            stack.emplace_back(n.right, d + 1);
        }
    }
    return max_depth;
}

bool operator==(const TrainConstants& a, const TrainConstants& b) {
    return a.l2_reg == b.l2_reg && a.leaf_penalty == b.leaf_penalty &&
           a.shrinkage == b.shrinkage;
}

void validate_tree(const Tree& tree, std::size_t feature_count,
                   const TrainConstants& constants, bool stats_complete) {
    if (tree.empty()) throw std::runtime_error("tree has no nodes");
    if (!tree.has_node(0)) throw std::runtime_error("broken tree topology: no root node 0");

    std::vector<int> parent_seen;
    for (const TreeNode& n : tree.nodes()) {
        if (!n.is_leaf) {
            if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= feature_count)
                throw std::runtime_error("feature index out of range on node " +
                                         std::to_string(n.id));
            if (!std::isfinite(n.threshold))
                throw std::runtime_error("non-finite threshold on node " + std::to_string(n.id));
            if (!tree.has_node(n.left) || !tree.has_node(n.right) || n.left == n.right)
                throw std::runtime_error("broken tree topology: node " + std::to_string(n.id) +
                                         " references missing child");
            parent_seen.push_back(n.left);
            parent_seen.push_back(n.right);
        } else if (!std::isfinite(n.weight)) {
            throw std::runtime_error("non-finite leaf weight on node " + std::to_string(n.id));
        }
        if (n.stats.count < 0)
            throw std::runtime_error("negative sample count on node " + std::to_string(n.id));
    }

    std::sort(parent_seen.begin(), parent_seen.end());
    for (std::size_t i = 1; i < parent_seen.size(); ++i)
        if (parent_seen[i] == parent_seen[i - 1])
            throw std::runtime_error("broken tree topology: node " +
                                     std::to_string(parent_seen[i]) + " has two parents");
    for (int child : parent_seen)
        if (child == 0)
            throw std::runtime_error("broken tree topology: root is referenced as a child");
    // every non-root node needs a parent, which with the two-children rule
    // above also rules out cycles
    if (parent_seen.size() + 1 != tree.size())
        throw std::runtime_error("broken tree topology: unreachable nodes present");

    if (stats_complete) {
        for (const TreeNode& n : tree.nodes()) {
            const double denom = n.stats.h_sum + constants.l2_reg;
            const double expected = denom > 0.0 ? -n.stats.g_sum / denom : 0.0;
            if (std::fabs(n.stats.score - expected) > 1e-9)
                throw std::runtime_error("stored score disagrees with G/H on node " +
                                         std::to_string(n.id));
            if (!n.is_leaf) {
                const TreeNode& l = tree.node(n.left);
                const TreeNode& r = tree.node(n.right);
                if (l.stats.count + r.stats.count != n.stats.count)
                    throw std::runtime_error("child counts do not sum to parent on node " +
                                             std::to_string(n.id));
            }
        }
    }
}

void validate_ensemble(const Ensemble& model) {
    if (model.feature_names.empty() && !model.trees.empty())
        throw std::runtime_error("model with trees but no feature names");
    if (!std::isfinite(model.base_score))
        throw std::runtime_error("non-finite base_score");
    if (model.constants.l2_reg < 0.0 || model.constants.leaf_penalty < 0.0)
        throw std::runtime_error("negative regularization constants");
    if (!(model.constants.shrinkage > 0.0 && model.constants.shrinkage <= 1.0))
        throw std::runtime_error("shrinkage outside (0,1]");
    for (const Tree& tree : model.trees)
        validate_tree(tree, model.feature_count(), model.constants, model.stats_complete);
}

}  // namespace driftboost
