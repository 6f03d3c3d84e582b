#include "driftboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <stdexcept>

namespace driftboost {

namespace {
constexpr double kProbEps = 1e-15;
}

void TrainConfig::validate() const {
    if (num_trees < 0) throw std::invalid_argument("num_trees must be >= 0");
    if (max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
    if (!(shrinkage > 0.0 && shrinkage <= 1.0))
        throw std::invalid_argument("shrinkage must lie in (0,1]");
    if (l2_reg < 0.0) throw std::invalid_argument("l2_reg must be >= 0");
    if (leaf_penalty < 0.0) throw std::invalid_argument("leaf_penalty must be >= 0");
    if (min_child_samples < 1) throw std::invalid_argument("min_child_samples must be >= 1");
    if (min_split_gain < 0.0) throw std::invalid_argument("min_split_gain must be >= 0");
    if (!(row_subsample > 0.0 && row_subsample <= 1.0))
        throw std::invalid_argument("row_subsample must lie in (0,1]");
}

double margin_to_prob(double margin) {
    if (!std::isfinite(margin)) throw std::invalid_argument("non-finite margin");
    double p;
    if (margin >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-margin));
    } else {
        const double e = std::exp(margin);
        p = e / (1.0 + e);
    }
    return std::clamp(p, kProbEps, 1.0 - kProbEps);
}

double logloss(int label, double prob) {
    if (label != 0 && label != 1) throw std::invalid_argument("label not binary");
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("probability outside (0,1)");
    return label == 1 ? -std::log(prob) : -std::log(1.0 - prob);
}

GradHessPair grad_hess(int label, double margin) {
    const double p = margin_to_prob(margin);
    return {p - static_cast<double>(label), p * (1.0 - p)};
}

double leaf_weight(double g_sum, double h_sum, double l2_reg) {
    const double denom = h_sum + l2_reg;
    if (!(denom > 0.0)) throw std::invalid_argument("h_sum + l2_reg must be positive");
    return -g_sum / denom;
}

double split_gain(const SplitSide& left, const SplitSide& right,
                  double l2_reg, double leaf_penalty) {
    const double dl = left.h_sum + l2_reg;
    const double dr = right.h_sum + l2_reg;
    const double dp = left.h_sum + right.h_sum + l2_reg;
    if (!(dl > 0.0 && dr > 0.0))
        throw std::invalid_argument("degenerate denominator in split gain");
    const double g_total = left.g_sum + right.g_sum;
    return 0.5 * (left.g_sum * left.g_sum / dl + right.g_sum * right.g_sum / dr -
                  g_total * g_total / dp) -
           leaf_penalty;
}

std::optional<SplitEvaluation> best_threshold_for_feature(
    int feature, std::span<const std::size_t> sample_ids, const Dataset& data,
    std::span<const GradHessPair> gh, double l2_reg, double leaf_penalty,
    std::int64_t min_child_samples) {
    const std::size_t n = sample_ids.size();
    if (n < 2) return std::nullopt;

    SplitSide total;
    for (std::size_t id : sample_ids) {
        total.g_sum += gh[id].g;
        total.h_sum += gh[id].h;
    }
    total.count = static_cast<std::int64_t>(n);

    std::vector<std::pair<double, std::size_t>> ordered(n);
    for (std::size_t i = 0; i < n; ++i)
        ordered[i] = {data.feature(sample_ids[i], static_cast<std::size_t>(feature)),
                      sample_ids[i]};
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::optional<SplitEvaluation> best;
    SplitSide left;
    for (std::size_t k = 1; k < n; ++k) {
        left.g_sum += gh[ordered[k - 1].second].g;
        left.h_sum += gh[ordered[k - 1].second].h;
        left.count = static_cast<std::int64_t>(k);
        if (ordered[k].first == ordered[k - 1].first) continue;
        if (left.count < min_child_samples) continue;
        SplitSide right{total.g_sum - left.g_sum, total.h_sum - left.h_sum,
                        total.count - left.count};
        if (right.count < min_child_samples) continue;
        const double gain = split_gain(left, right, l2_reg, leaf_penalty);
        // strict improvement keeps the lowest qualifying threshold on ties
        if (!best || gain > best->gain) {
            best = SplitEvaluation{feature,
                                   std::midpoint(ordered[k - 1].first, ordered[k].first),
                                   gain, left, right};
        }
    }
    return best;
}

std::optional<SplitEvaluation> find_best_split(
    std::span<const std::size_t> sample_ids, const Dataset& data,
    std::span<const GradHessPair> gh, const TrainConfig& config) {
    if (sample_ids.size() <
        2 * static_cast<std::size_t>(config.min_child_samples))
        return std::nullopt;
    std::optional<SplitEvaluation> best;
    for (std::size_t f = 0; f < data.feature_count(); ++f) {
        auto cand = best_threshold_for_feature(static_cast<int>(f), sample_ids, data,
                                               gh, config.l2_reg, config.leaf_penalty,
                                               config.min_child_samples);
        if (!cand || !(cand->gain > config.min_split_gain)) continue;
        // strict improvement keeps the lowest qualifying feature index on ties
        if (!best || cand->gain > best->gain) best = cand;
    }
    return best;
}

namespace {

double safe_score(double g_sum, double h_sum, double l2_reg) {
    const double denom = h_sum + l2_reg;
    return denom > 0.0 ? -g_sum / denom : 0.0;
}

NodeStats stats_over(std::span<const std::size_t> ids,
                     std::span<const GradHessPair> gh, double l2_reg) {
    NodeStats s;
    for (std::size_t id : ids) {
        s.g_sum += gh[id].g;
        s.h_sum += gh[id].h;
    }
    s.count = static_cast<std::int64_t>(ids.size());
    s.score = safe_score(s.g_sum, s.h_sum, l2_reg);
    return s;
}

}  // namespace

Tree build_tree(const Dataset& data, std::span<const double> margins,
                const TrainConfig& config) {
    std::vector<std::size_t> rows(data.row_count());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return build_tree(data, margins, config, rows);
}

Tree build_tree(const Dataset& data, std::span<const double> margins,
                const TrainConfig& config, std::span<const std::size_t> rows) {
    config.validate();
    if (margins.size() != data.row_count())
        throw std::invalid_argument("margins length does not match dataset rows");
    if (rows.empty()) throw std::invalid_argument("no rows to build a tree from");

    std::vector<GradHessPair> gh(data.row_count());
    for (std::size_t id : rows) gh[id] = grad_hess(data.label(id), margins[id]);

    struct Pending {
        int id;
        std::vector<std::size_t> ids;
        int depth;
    };

    Tree tree;
    int next_id = 0;
    std::deque<Pending> queue;
    queue.push_back({next_id++, std::vector<std::size_t>(rows.begin(), rows.end()), 0});

    while (!queue.empty()) {
        Pending item = std::move(queue.front());
        queue.pop_front();

        TreeNode node;
        node.id = item.id;
        node.stats = stats_over(item.ids, gh, config.l2_reg);
        node.origin = NodeOrigin::source;

        std::optional<SplitEvaluation> split;
        if (item.depth < config.max_depth)
            split = find_best_split(item.ids, data, gh, config);

        if (split) {
            node.is_leaf = false;
            node.feature = split->feature;
            node.threshold = split->threshold;
            node.left = next_id++;
            node.right = next_id++;

            std::vector<std::size_t> left_ids, right_ids;
            left_ids.reserve(static_cast<std::size_t>(split->left.count));
            right_ids.reserve(static_cast<std::size_t>(split->right.count));
            for (std::size_t id : item.ids) {
                if (data.feature(id, static_cast<std::size_t>(split->feature)) <
                    split->threshold)
                    left_ids.push_back(id);
                else
                    right_ids.push_back(id);
            }
            queue.push_back({node.left, std::move(left_ids), item.depth + 1});
            queue.push_back({node.right, std::move(right_ids), item.depth + 1});
        } else {
            node.is_leaf = true;
            node.weight = config.shrinkage * node.stats.score;
        }
        tree.add_node(std::move(node));
    }
    return tree;
}

Ensemble train(const Dataset& data, const TrainConfig& config,
               const Ensemble* base, std::vector<double>* loss_curve) {
    config.validate();

    Ensemble model;
    if (base != nullptr) {
        if (base->feature_count() != data.feature_count())
            throw std::invalid_argument("base model feature count does not match data");
        if (!base->feature_names.empty() && base->feature_names != data.feature_names())
            throw std::invalid_argument("feature-space mismatch between base model and data");
        if (!(base->constants == config.constants()))
            throw std::invalid_argument(
                "base model was trained with different shrinkage/regularization constants");
        if (!base->stats_complete)
            throw std::invalid_argument("cannot continue training a stats-incomplete model");
        model = *base;
    } else {
        model.feature_names = data.feature_names();
        model.constants = config.constants();
        model.base_score = 0.0;
    }

    std::vector<double> margins = predict_margins(model, data);

    std::mt19937_64 rng(config.seed);
    const std::size_t n = data.row_count();
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    for (int t = 0; t < config.num_trees; ++t) {
        std::vector<std::size_t> rows;
        if (config.row_subsample < 1.0) {
            std::size_t k = static_cast<std::size_t>(
                std::floor(config.row_subsample * static_cast<double>(n)));
            k = std::clamp<std::size_t>(k, 1, n);
            std::vector<std::size_t> pool = all_rows;
            for (std::size_t i = 0; i < k; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
                std::swap(pool[i], pool[pick(rng)]);
            }
            pool.resize(k);
            std::sort(pool.begin(), pool.end());
            rows = std::move(pool);
        } else {
            rows = all_rows;
        }

        Tree tree = build_tree(data, margins, config, rows);
        for (std::size_t i = 0; i < n; ++i) margins[i] += tree.leaf_value(data.row(i));
        model.trees.push_back(std::move(tree));

        if (loss_curve != nullptr) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                total += logloss(data.label(i), margin_to_prob(margins[i]));
            loss_curve->push_back(total / static_cast<double>(n));
        }
    }
    return model;
}

double predict_margin(const Ensemble& model, std::span<const double> x) {
    if (!model.feature_names.empty() && x.size() != model.feature_count())
        throw std::invalid_argument("feature vector length does not match model");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite input value");
    double margin = model.base_score;
    for (const Tree& tree : model.trees) margin += tree.leaf_value(x);
    return margin;
}

double predict_prob(const Ensemble& model, std::span<const double> x) {
    return margin_to_prob(predict_margin(model, x));
}

std::vector<double> predict_margins(const Ensemble& model, const Dataset& data) {
    if (!model.feature_names.empty() && model.feature_count() != data.feature_count())
        throw std::invalid_argument("feature-space mismatch between model and data");
    std::vector<double> margins(data.row_count());
    for (std::size_t i = 0; i < data.row_count(); ++i)
        margins[i] = predict_margin(model, data.row(i));
    return margins;
}

double mean_logloss(const Ensemble& model, const Dataset& data) {
    const std::vector<double> margins = predict_margins(model, data);
    double total = 0.0;
    for (std::size_t i = 0; i < data.row_count(); ++i)
        total += logloss(data.label(i), margin_to_prob(margins[i]));
    return total / static_cast<double>(data.row_count());
}

}  // namespace driftboost
