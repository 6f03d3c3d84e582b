#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "driftboost/boosting.hpp"

namespace driftboost {

enum class ResplitMode { gain_based, fractile, off };
enum class RareBranchPolicy { prune, discount };

struct ReviseConfig {
    ResplitMode resplit_mode = ResplitMode::gain_based;
    bool reweight = true;
    RareBranchPolicy rare_branch_policy = RareBranchPolicy::discount;
    std::int64_t min_samples_threshold = 30;
    double discount_factor = 0.1;
    // target-side constants; workflows keep these equal to the training ones
    double l2_reg = 1.0;
    double leaf_penalty = 0.0;
    double shrinkage = 0.1;

    void validate() const;
    // With re-split and re-weight both off the revision is a pass-through:
    // the tree is transferred untouched.
    bool is_identity() const { return resplit_mode == ResplitMode::off && !reweight; }
    TrainConstants constants() const { return {l2_reg, leaf_penalty, shrinkage}; }
};

enum class ReviseAction { resplit, reweight, prune, discount, skip };
const char* to_string(ReviseAction action);

// One row per node of the revised tree, holding the source-side and
// target-side statistics the revision compared.
struct ReviseRecord {
    int node_id = 0;
    ReviseAction action = ReviseAction::skip;
    int feature = -1;  // -1 when the source node is a leaf
    double split_val_s = std::numeric_limits<double>::quiet_NaN();
    double split_val_t = std::numeric_limits<double>::quiet_NaN();
    double gain_s = std::numeric_limits<double>::quiet_NaN();
    double gain_t = std::numeric_limits<double>::quiet_NaN();
    std::int64_t count_s = 0;
    std::int64_t count_t = 0;
    double score_s = 0.0;
    double score_t = 0.0;
};

struct ReviseTrace {
    std::vector<ReviseRecord> records;  // node_id ascending
};

// Tab-separated table: node_id, feat_id, split_val_s, split_gain_s, inst#_s,
// score_s, split_val_t, split_gain_t, inst#_t, score_t, delta_score, action.
std::string trace_table(const ReviseTrace& trace);
std::string trace_table(const std::vector<ReviseTrace>& traces);

// Empirical quantile of node_values at source_left_fraction (nearest rank,
// lower), shifted to the midpoint toward the next distinct value so routing
// is unambiguous. Needs at least two distinct values.
double fractile_resplit(double source_left_fraction,
                        std::vector<double> node_values);

// Adapts one source tree to the target dataset. Margins come from the prefix
// ensemble (base_score included), target rows are routed top-down and
// re-routed under every threshold change before children are visited. Rare
// subtrees (fewer than min_samples_threshold rows, or no positive re-split
// gain) are pruned to a leaf or kept with discounted weights. Per-node stats
// are rewritten with target-side values. The trace covers every node of the
// returned tree exactly once.
std::pair<Tree, ReviseTrace> revise_one_tree(const Ensemble& prefix,
                                             const Tree& source_tree,
                                             const Dataset& target,
                                             const ReviseConfig& config,
                                             bool source_stats_complete = true);

// Rebuilds the revised tree (structure, thresholds, weights, counts, scores)
// from a source tree plus its trace. G/H sums are not part of the trace and
// are left at zero.
Tree replay_trace(const Tree& source_tree, const ReviseTrace& trace,
                  const ReviseConfig& config);

}  // namespace driftboost
