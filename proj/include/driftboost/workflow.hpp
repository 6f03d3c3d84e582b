#pragma once

#include <string>
#include <vector>

#include "driftboost/revise.hpp"

namespace driftboost {

struct WorkflowConfig {
    TrainConfig source_train;  // num_trees/max_depth = source-side T and L
    TrainConfig target_train;  // target-side T and L
    ReviseConfig revise;
    // When set, every cross-domain model handoff goes through save/load on
    // disk, the way two isolated projects would exchange models.
    bool exchange_via_file = false;
    std::string exchange_dir;  // empty -> system temp directory

    // Shrinkage, l2 and leaf penalty must agree across source, target and
    // revision configs; a model stores a single set of constants.
    void validate() const;
};

struct TransferResult {
    Ensemble model;
    std::vector<ReviseTrace> traces;  // one per transferred source tree
};

// Trains source_train.num_trees trees on the source domain, revises them one
// by one against the target domain (each revision sees margins of the already
// revised prefix), then continues with target_train.num_trees trees on the
// target domain.
TransferResult one_round(const Dataset& source, const Dataset& target,
                         const WorkflowConfig& config);

// Alternates: train one source tree against the current mixed base model,
// revise it on the target domain, write the revised tree back into the source
// base so the next source tree's gradients see it. Ends with target-side
// training like one_round.
TransferResult multi_round(const Dataset& source, const Dataset& target,
                           const WorkflowConfig& config);

}  // namespace driftboost
