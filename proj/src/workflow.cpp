#include "driftboost/workflow.hpp"

#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "driftboost/model_io.hpp"
#include "driftboost/text.hpp"

namespace driftboost {

namespace {

// FNV-1a over the numeric configuration, so identical setups stamp identical
// digests regardless of which workflow produced the model
std::string config_digest(const WorkflowConfig& cfg) {
    std::string text;
    auto add = [&text](const std::string& part) { text += part + "|"; };
    add(std::to_string(cfg.source_train.num_trees));
    add(std::to_string(cfg.source_train.max_depth));
    add(std::to_string(cfg.target_train.num_trees));
    add(std::to_string(cfg.target_train.max_depth));
    add(format_double(cfg.source_train.shrinkage));
    add(format_double(cfg.source_train.l2_reg));
    add(format_double(cfg.source_train.leaf_penalty));
    add(std::to_string(cfg.source_train.min_child_samples));
    add(format_double(cfg.source_train.min_split_gain));
    add(format_double(cfg.source_train.row_subsample));
    add(std::to_string(cfg.source_train.seed));
    add(std::to_string(cfg.target_train.seed));
    add(std::to_string(static_cast<int>(cfg.revise.resplit_mode)));
    add(cfg.revise.reweight ? "1" : "0");
    add(std::to_string(static_cast<int>(cfg.revise.rare_branch_policy)));
    add(std::to_string(cfg.revise.min_samples_threshold));
    add(format_double(cfg.revise.discount_factor));
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

// simulated cross-domain handoff: the model leaves one project as a file and
// enters the other by parsing it back
struct Exchanger {
    bool enabled;
    std::filesystem::path dir;
    int counter = 0;

    explicit Exchanger(const WorkflowConfig& cfg) : enabled(cfg.exchange_via_file) {
        if (!enabled) return;
        dir = cfg.exchange_dir.empty()
                  ? std::filesystem::temp_directory_path() /
                        ("driftboost-exchange-" + std::to_string(::getpid()))
                  : std::filesystem::path(cfg.exchange_dir);
        std::filesystem::create_directories(dir);
    }

    Ensemble pass(const Ensemble& model) {
        if (!enabled) return model;
        const auto path = dir / ("model_" + std::to_string(counter++) + ".json");
        save_model(model, path.string());
        Ensemble loaded = load_model(path.string());
        std::filesystem::remove(path);
        return loaded;
    }
};

void stamp_provenance(Ensemble& model, const WorkflowConfig& cfg, int exchange_rounds,
                      bool any_transfer) {
    // only revised models get lineage metadata; a pass-through transfer stays
    // byte-identical to plain training
    if (cfg.revise.is_identity() || !any_transfer) return;
    model.provenance["domain"] = "target";
    model.provenance["rounds"] = std::to_string(exchange_rounds);
    model.provenance["config"] = config_digest(cfg);
}

Ensemble empty_prefix(const Dataset& target, const WorkflowConfig& cfg) {
    Ensemble prefix;
    prefix.feature_names = target.feature_names();
    prefix.constants = cfg.revise.constants();
    prefix.base_score = 0.0;
    return prefix;
}

}  // namespace

void WorkflowConfig::validate() const {
    source_train.validate();
    target_train.validate();
    revise.validate();
    if (!(source_train.constants() == target_train.constants()) ||
        !(source_train.constants() == revise.constants()))
        throw std::invalid_argument(
            "shrinkage/l2_reg/leaf_penalty must match across source, target and "
            "revise configs");
}

TransferResult one_round(const Dataset& source, const Dataset& target,
                         const WorkflowConfig& config) {
    config.validate();
    if (source.feature_names() != target.feature_names())
        throw std::invalid_argument("feature-space mismatch between domains");

    Exchanger exchanger(config);
    TransferResult result;

    Ensemble source_model = train(source, config.source_train);
    source_model = exchanger.pass(source_model);

    Ensemble prefix = empty_prefix(target, config);
    prefix.base_score = source_model.base_score;
    for (const Tree& tree : source_model.trees) {
        auto [revised, trace] = revise_one_tree(prefix, tree, target, config.revise,
                                                source_model.stats_complete);
        prefix.trees.push_back(std::move(revised));
        result.traces.push_back(std::move(trace));
    }

    result.model = train(target, config.target_train, &prefix);
    stamp_provenance(result.model, config, 1, !result.traces.empty());
    return result;
}

TransferResult multi_round(const Dataset& source, const Dataset& target,
                           const WorkflowConfig& config) {
    config.validate();
    if (source.feature_names() != target.feature_names())
        throw std::invalid_argument("feature-space mismatch between domains");

    Exchanger exchanger(config);
    TransferResult result;

    Ensemble source_model;
    source_model.feature_names = source.feature_names();
    source_model.constants = config.source_train.constants();
    Ensemble prefix = empty_prefix(target, config);

    TrainConfig one_tree = config.source_train;
    one_tree.num_trees = 1;

    for (int i = 0; i < config.source_train.num_trees; ++i) {
        source_model = train(source, one_tree, &source_model);
        source_model = exchanger.pass(source_model);  // source -> target

        auto [revised, trace] =
            revise_one_tree(prefix, source_model.trees.back(), target, config.revise,
                            source_model.stats_complete);
        prefix.trees.push_back(revised);
        result.traces.push_back(std::move(trace));

        // write the revised tree back so the next source tree's gradients see it
        source_model.trees.back() = std::move(revised);
        source_model = exchanger.pass(source_model);  // target -> source
    }

    result.model = train(target, config.target_train, &prefix);
    stamp_provenance(result.model, config, config.source_train.num_trees,
                     !result.traces.empty());
    return result;
}

}  // namespace driftboost
