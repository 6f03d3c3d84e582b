#include "driftboost/revise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "driftboost/text.hpp"

namespace driftboost {

void ReviseConfig::validate() const {
    if (!(discount_factor > 0.0 && discount_factor <= 1.0))
        throw std::invalid_argument("discount_factor must lie in (0,1]");
    if (min_samples_threshold < 1)
        throw std::invalid_argument("min_samples_threshold must be >= 1");
    if (l2_reg < 0.0) throw std::invalid_argument("l2_reg must be >= 0");
    if (leaf_penalty < 0.0) throw std::invalid_argument("leaf_penalty must be >= 0");
    if (!(shrinkage > 0.0 && shrinkage <= 1.0))
        throw std::invalid_argument("shrinkage must lie in (0,1]");
}

const char* to_string(ReviseAction action) {
    switch (action) {
        case ReviseAction::resplit: return "resplit";
        case ReviseAction::reweight: return "reweight";
        case ReviseAction::prune: return "prune";
        case ReviseAction::discount: return "discount";
        case ReviseAction::skip: return "skip";
    }
    return "skip";
}

double fractile_resplit(double source_left_fraction,
                        std::vector<double> node_values) {
    if (!(source_left_fraction > 0.0 && source_left_fraction < 1.0))
        throw std::invalid_argument("source_left_fraction must lie in (0,1)");
    if (node_values.size() < 2)
        throw std::invalid_argument("fractile re-split needs at least two samples");
    std::sort(node_values.begin(), node_values.end());
    if (node_values.front() == node_values.back())
        throw std::invalid_argument("fractile re-split needs two distinct values");

    const std::size_t n = node_values.size();
    // nearest-rank (lower); the tiny shift guards against FP noise in q*n
    auto rank = static_cast<std::size_t>(
        std::ceil(source_left_fraction * static_cast<double>(n) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n) - 1;

    const double at = node_values[rank];
    auto next = std::upper_bound(node_values.begin(), node_values.end(), at);
    if (next != node_values.end()) return std::midpoint(at, *next);
    // quantile landed on the maximum: step to the midpoint below it instead so
    // both sides stay nonempty
    auto prev = std::lower_bound(node_values.begin(), node_values.end(), at);
    return std::midpoint(*(prev - 1), at);
}

namespace {

double safe_score(double g_sum, double h_sum, double l2_reg) {
    const double denom = h_sum + l2_reg;
    return denom > 0.0 ? -g_sum / denom : 0.0;
}

NodeStats stats_over(const std::vector<std::size_t>& ids,
                     const std::vector<GradHessPair>& gh, double l2_reg) {
    NodeStats s;
    for (std::size_t id : ids) {
        s.g_sum += gh[id].g;
        s.h_sum += gh[id].h;
    }
    s.count = static_cast<std::int64_t>(ids.size());
    s.score = safe_score(s.g_sum, s.h_sum, l2_reg);
    return s;
}

struct Reviser {
    const Ensemble& prefix;
    const Tree& src;
    const Dataset& target;
    const ReviseConfig& cfg;
    bool stats_complete;
    std::vector<GradHessPair> gh;
    Tree out;
    std::vector<ReviseRecord> records;

    double source_gain(const TreeNode& n) const {
        if (n.is_leaf || !stats_complete)
            return std::numeric_limits<double>::quiet_NaN();
        const TreeNode& l = src.node(n.left);
        const TreeNode& r = src.node(n.right);
        return split_gain({l.stats.g_sum, l.stats.h_sum, l.stats.count},
                          {r.stats.g_sum, r.stats.h_sum, r.stats.count},
                          prefix.constants.l2_reg, prefix.constants.leaf_penalty);
    }

    ReviseRecord base_record(const TreeNode& sn, const NodeStats& tstats) const {
        ReviseRecord rec;
        rec.node_id = sn.id;
        rec.feature = sn.is_leaf ? -1 : sn.feature;
        if (!sn.is_leaf) rec.split_val_s = sn.threshold;
        rec.gain_s = source_gain(sn);
        rec.count_s = sn.stats.count;
        rec.count_t = tstats.count;
        rec.score_s = sn.stats.score;
        rec.score_t = tstats.score;
        return rec;
    }

    void split_ids(const std::vector<std::size_t>& ids, int feature, double threshold,
                   std::vector<std::size_t>& left, std::vector<std::size_t>& right) const {
        left.clear();
        right.clear();
        for (std::size_t id : ids) {
            if (target.feature(id, static_cast<std::size_t>(feature)) < threshold)
                left.push_back(id);
            else
                right.push_back(id);
        }
    }

    // rare-branch handling: collapse to a leaf, or keep the subtree with
    // discounted leaf weights
    void handle_rare(const TreeNode& sn, const std::vector<std::size_t>& ids,
                     double scanned_gain) {
        const NodeStats tstats = stats_over(ids, gh, cfg.l2_reg);
        if (cfg.rare_branch_policy == RareBranchPolicy::prune) {
            TreeNode n = sn;
            n.is_leaf = true;
            n.feature = -1;
            n.threshold = 0.0;
            n.left = n.right = -1;
            n.stats = tstats;
            n.origin = NodeOrigin::pruned;
            if (tstats.count >= cfg.min_samples_threshold) {
                n.weight = cfg.shrinkage * leaf_weight(tstats.g_sum, tstats.h_sum, cfg.l2_reg);
            } else {
                if (!stats_complete)
                    throw std::runtime_error(
                        "stats-incomplete source model: no source score to discount for "
                        "pruned node " + std::to_string(sn.id));
                n.weight = cfg.discount_factor * sn.stats.score;
            }
            ReviseRecord rec = base_record(sn, tstats);
            rec.action = ReviseAction::prune;
            rec.gain_t = scanned_gain;
            records.push_back(rec);
            out.add_node(std::move(n));
            return;
        }
        discount_subtree(sn, ids, scanned_gain);
    }

    void discount_subtree(const TreeNode& sn, const std::vector<std::size_t>& ids,
                          double scanned_gain) {
        const NodeStats tstats = stats_over(ids, gh, cfg.l2_reg);
        TreeNode n = sn;  // structure and thresholds kept verbatim
        n.stats = tstats;
        n.origin = NodeOrigin::discounted;
        if (sn.is_leaf) n.weight = cfg.discount_factor * sn.weight;

        ReviseRecord rec = base_record(sn, tstats);
        rec.action = ReviseAction::discount;
        rec.gain_t = scanned_gain;
        if (!sn.is_leaf) rec.split_val_t = sn.threshold;
        records.push_back(rec);
        out.add_node(std::move(n));

        if (!sn.is_leaf) {
            std::vector<std::size_t> left, right;
            split_ids(ids, sn.feature, sn.threshold, left, right);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            discount_subtree(src.node(sn.left), left, nan);
            discount_subtree(src.node(sn.right), right, nan);
        }
    }

    void revise_leaf(const TreeNode& sn, const std::vector<std::size_t>& ids) {
        const NodeStats tstats = stats_over(ids, gh, cfg.l2_reg);
        TreeNode n = sn;
        n.stats = tstats;
        ReviseRecord rec = base_record(sn, tstats);
        if (cfg.reweight && tstats.count >= cfg.min_samples_threshold) {
            n.weight = cfg.shrinkage * leaf_weight(tstats.g_sum, tstats.h_sum, cfg.l2_reg);
            n.origin = NodeOrigin::revised;
            rec.action = ReviseAction::reweight;
        } else if (cfg.reweight) {
            // a leaf with too few target rows keeps the source pattern at
            // reduced confidence; raw source weights never mix with revised ones
            n.weight = cfg.discount_factor * sn.weight;
            n.origin = NodeOrigin::discounted;
            rec.action = ReviseAction::discount;
        } else {
            n.origin = NodeOrigin::revised;
            rec.action = ReviseAction::skip;
        }
        records.push_back(rec);
        out.add_node(std::move(n));
    }

    void walk(const TreeNode& sn, const std::vector<std::size_t>& ids) {
        if (sn.is_leaf) {
            revise_leaf(sn, ids);
            return;
        }
        const auto count = static_cast<std::int64_t>(ids.size());
        if (count < cfg.min_samples_threshold) {
            handle_rare(sn, ids, std::numeric_limits<double>::quiet_NaN());
            return;
        }

        const NodeStats tstats = stats_over(ids, gh, cfg.l2_reg);
        double new_threshold = sn.threshold;
        double gain_t = std::numeric_limits<double>::quiet_NaN();
        ReviseAction action = ReviseAction::skip;

        switch (cfg.resplit_mode) {
            case ResplitMode::gain_based: {
                // the source split feature is kept, only the cut point moves
                auto best = best_threshold_for_feature(sn.feature, ids, target, gh,
                                                       cfg.l2_reg, cfg.leaf_penalty, 1);
                if (!best || !(best->gain > 0.0)) {
                    handle_rare(sn, ids,
                                best ? best->gain
                                     : std::numeric_limits<double>::quiet_NaN());
                    return;
                }
                new_threshold = best->threshold;
                gain_t = best->gain;
                action = ReviseAction::resplit;
                break;
            }
            case ResplitMode::fractile: {
                if (count < 2 || sn.stats.count <= 0) {
                    handle_rare(sn, ids, std::numeric_limits<double>::quiet_NaN());
                    return;
                }
                const double left_fraction =
                    static_cast<double>(src.node(sn.left).stats.count) /
                    static_cast<double>(sn.stats.count);
                if (!(left_fraction > 0.0 && left_fraction < 1.0)) {
                    handle_rare(sn, ids, std::numeric_limits<double>::quiet_NaN());
                    return;
                }
                std::vector<double> values;
                values.reserve(ids.size());
                for (std::size_t id : ids)
                    values.push_back(
                        target.feature(id, static_cast<std::size_t>(sn.feature)));
                if (std::all_of(values.begin(), values.end(),
                                [&](double v) { return v == values.front(); })) {
                    handle_rare(sn, ids, std::numeric_limits<double>::quiet_NaN());
                    return;
                }
                new_threshold = fractile_resplit(left_fraction, values);
                action = ReviseAction::resplit;
                break;
            }
            case ResplitMode::off:
                break;
        }

        std::vector<std::size_t> left, right;
        split_ids(ids, sn.feature, new_threshold, left, right);

        if (cfg.resplit_mode == ResplitMode::fractile) {
            gain_t = split_gain(stats_side(left), stats_side(right), cfg.l2_reg,
                                cfg.leaf_penalty);
        } else if (cfg.resplit_mode == ResplitMode::off && !left.empty() &&
                   !right.empty()) {
            gain_t = split_gain(stats_side(left), stats_side(right), cfg.l2_reg,
                                cfg.leaf_penalty);
        }

        TreeNode n = sn;
        n.threshold = new_threshold;
        n.stats = tstats;
        n.origin = NodeOrigin::revised;
        ReviseRecord rec = base_record(sn, tstats);
        rec.action = action;
        rec.split_val_t = new_threshold;
        rec.gain_t = gain_t;
        records.push_back(rec);
        out.add_node(std::move(n));

        walk(src.node(sn.left), left);
        walk(src.node(sn.right), right);
    }

    SplitSide stats_side(const std::vector<std::size_t>& ids) const {
        SplitSide s;
        for (std::size_t id : ids) {
            s.g_sum += gh[id].g;
            s.h_sum += gh[id].h;
        }
        s.count = static_cast<std::int64_t>(ids.size());
        return s;
    }
};

}  // namespace

std::pair<Tree, ReviseTrace> revise_one_tree(const Ensemble& prefix,
                                             const Tree& source_tree,
                                             const Dataset& target,
                                             const ReviseConfig& config,
                                             bool source_stats_complete) {
    config.validate();
    if (source_tree.empty()) throw std::invalid_argument("source tree is empty");
    for (const TreeNode& n : source_tree.nodes())
        if (!n.is_leaf && static_cast<std::size_t>(n.feature) >= target.feature_count())
            throw std::invalid_argument(
                "source tree splits on a feature outside the target feature space");
    if (!prefix.feature_names.empty() &&
        prefix.feature_names != target.feature_names())
        throw std::invalid_argument("feature-space mismatch between prefix model and target");

    if (config.is_identity()) {
        // pass-through transfer: the tree and its statistics stay untouched
        ReviseTrace trace;
        for (const TreeNode& n : source_tree.nodes()) {
            ReviseRecord rec;
            rec.node_id = n.id;
            rec.action = ReviseAction::skip;
            rec.feature = n.is_leaf ? -1 : n.feature;
            if (!n.is_leaf) {
                rec.split_val_s = n.threshold;
                rec.split_val_t = n.threshold;
            }
            rec.count_s = n.stats.count;
            rec.score_s = n.stats.score;
            rec.score_t = n.stats.score;
            trace.records.push_back(rec);
        }
        return {source_tree, std::move(trace)};
    }

    if (!source_stats_complete &&
        (config.rare_branch_policy == RareBranchPolicy::discount ||
         config.resplit_mode == ResplitMode::fractile))
        throw std::runtime_error(
            "stats-incomplete source model: discount and fractile re-split need "
            "per-node statistics");

    Reviser reviser{prefix, source_tree, target, config, source_stats_complete,
                    {},     {},          {}};
    const std::vector<double> margins = predict_margins(prefix, target);
    reviser.gh.resize(target.row_count());
    for (std::size_t i = 0; i < target.row_count(); ++i)
        reviser.gh[i] = grad_hess(target.label(i), margins[i]);

    std::vector<std::size_t> all(target.row_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    reviser.walk(source_tree.root(), all);

    ReviseTrace trace;
    trace.records = std::move(reviser.records);
    std::sort(trace.records.begin(), trace.records.end(),
              [](const ReviseRecord& a, const ReviseRecord& b) {
                  return a.node_id < b.node_id;
              });
    return {std::move(reviser.out), std::move(trace)};
}

Tree replay_trace(const Tree& source_tree, const ReviseTrace& trace,
                  const ReviseConfig& config) {
    config.validate();
    Tree out;

    auto record_for = [&](int id) -> const ReviseRecord& {
        for (const ReviseRecord& rec : trace.records)
            if (rec.node_id == id) return rec;
        throw std::runtime_error("trace has no record for node " + std::to_string(id));
    };

    // recursive rebuild mirroring the revision walk
    auto rebuild = [&](auto&& self, int id) -> void {
        const TreeNode& sn = source_tree.node(id);
        const ReviseRecord& rec = record_for(id);
        TreeNode n = sn;
        n.stats = NodeStats{0.0, 0.0, rec.count_t, rec.score_t};
        switch (rec.action) {
            case ReviseAction::resplit:
                n.threshold = rec.split_val_t;
                n.origin = NodeOrigin::revised;
                out.add_node(std::move(n));
                self(self, sn.left);
                self(self, sn.right);
                return;
            case ReviseAction::skip:
                n.origin = NodeOrigin::revised;
                out.add_node(std::move(n));
                if (!sn.is_leaf) {
                    self(self, sn.left);
                    self(self, sn.right);
                }
                return;
            case ReviseAction::reweight:
                n.weight = config.shrinkage * rec.score_t;
                n.origin = NodeOrigin::revised;
                out.add_node(std::move(n));
                return;
            case ReviseAction::discount:
                n.origin = NodeOrigin::discounted;
                if (sn.is_leaf) n.weight = config.discount_factor * sn.weight;
                out.add_node(std::move(n));
                if (!sn.is_leaf) {
                    self(self, sn.left);
                    self(self, sn.right);
                }
                return;
            case ReviseAction::prune:
                n.is_leaf = true;
                n.feature = -1;
                n.threshold = 0.0;
                n.left = n.right = -1;
                n.origin = NodeOrigin::pruned;
                n.weight = rec.count_t >= config.min_samples_threshold
                               ? config.shrinkage * rec.score_t
                               : config.discount_factor * sn.stats.score;
                out.add_node(std::move(n));
                return;
        }
    };
    rebuild(rebuild, 0);
    return out;
}

namespace {

std::string trace_cell(double v) {
    return std::isnan(v) ? std::string() : format_double(v);
}

void append_trace_rows(std::string& out, const ReviseTrace& trace) {
    for (const ReviseRecord& r : trace.records) {
        out += std::to_string(r.node_id);
        out += '\t';
        if (r.feature >= 0) out += std::to_string(r.feature);
        out += '\t' + trace_cell(r.split_val_s);
        out += '\t' + trace_cell(r.gain_s);
        out += '\t' + std::to_string(r.count_s);
        out += '\t' + format_double(r.score_s);
        out += '\t' + trace_cell(r.split_val_t);
        out += '\t' + trace_cell(r.gain_t);
        out += '\t' + std::to_string(r.count_t);
        out += '\t' + format_double(r.score_t);
        out += '\t' + format_double(std::fabs(r.score_t - r.score_s));
        out += '\t';
        out += to_string(r.action);
        out += '\n';
    }
}

}  // namespace

std::string trace_table(const ReviseTrace& trace) {
    std::string out =
        "node_id\tfeat_id\tsplit_val_s\tsplit_gain_s\tinst#_s\tscore_s\t"
        "split_val_t\tsplit_gain_t\tinst#_t\tscore_t\tdelta_score\taction\n";
    append_trace_rows(out, trace);
    return out;
}

std::string trace_table(const std::vector<ReviseTrace>& traces) {
    std::string out =
        "node_id\tfeat_id\tsplit_val_s\tsplit_gain_s\tinst#_s\tscore_s\t"
        "split_val_t\tsplit_gain_t\tinst#_t\tscore_t\tdelta_score\taction\n";
    for (std::size_t i = 0; i < traces.size(); ++i) {
        out += "# tree " + std::to_string(i) + "\n";
        append_trace_rows(out, traces[i]);
    }
    return out;
}

}  // namespace driftboost
