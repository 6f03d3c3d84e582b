#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "driftboost/dataset.hpp"
#include "driftboost/model.hpp"

namespace driftboost {

// First and second derivative of the logloss with respect to the margin.
struct GradHessPair {
    double g = 0.0;
    double h = 0.0;
};

struct TrainConfig {
    int num_trees = 0;
    int max_depth = 5;          // root is depth 0
    double shrinkage = 0.1;
    double l2_reg = 1.0;
    double leaf_penalty = 0.0;
    int min_child_samples = 1;
    double min_split_gain = 0.0;  // a split needs gain strictly above this
    double row_subsample = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    TrainConstants constants() const { return {l2_reg, leaf_penalty, shrinkage}; }
};

// Sigmoid with the probability clamped to [1e-15, 1-1e-15] so logloss and
// derivatives stay finite at extreme margins.
double margin_to_prob(double margin);

// -y*ln(p) - (1-y)*ln(1-p); p must lie in the open interval (0,1).
double logloss(int label, double prob);

// g = p - y, h = p*(1-p) with p = margin_to_prob(margin).
GradHessPair grad_hess(int label, double margin);

// Optimal leaf value -G/(H+lambda); H+lambda must be positive.
double leaf_weight(double g_sum, double h_sum, double l2_reg);

struct SplitSide {
    double g_sum = 0.0;
    double h_sum = 0.0;
    std::int64_t count = 0;
};

// Objective decrease of turning one leaf into two:
//   0.5*(GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)) - leaf_penalty.
double split_gain(const SplitSide& left, const SplitSide& right,
                  double l2_reg, double leaf_penalty);

struct SplitEvaluation {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    SplitSide left;
    SplitSide right;
};

// Best threshold for a single feature over the given rows. Candidates sit at
// midpoints between consecutive distinct values; both children must hold at
// least min_child_samples rows. Returns the highest-gain candidate regardless
// of sign (callers apply their own gain cutoff), ties resolved toward the
// lower threshold. Empty when no candidate exists.
std::optional<SplitEvaluation> best_threshold_for_feature(
    int feature, std::span<const std::size_t> sample_ids, const Dataset& data,
    std::span<const GradHessPair> gh, double l2_reg, double leaf_penalty,
    std::int64_t min_child_samples);

// Exact greedy search over every feature. Only splits with
// gain > config.min_split_gain qualify; ties break toward the lower feature
// index, then the lower threshold. Empty when no admissible split exists.
std::optional<SplitEvaluation> find_best_split(
    std::span<const std::size_t> sample_ids, const Dataset& data,
    std::span<const GradHessPair> gh, const TrainConfig& config);

// Depth-wise growth to config.max_depth. Every node records (G, H, count,
// score); leaves store weight = shrinkage * score. Ids follow creation order
// (breadth first, root 0).
Tree build_tree(const Dataset& data, std::span<const double> margins,
                const TrainConfig& config);
Tree build_tree(const Dataset& data, std::span<const double> margins,
                const TrainConfig& config, std::span<const std::size_t> rows);

// Appends config.num_trees trees to a copy of base (or to a fresh model).
// Margins before each tree are the additive prediction of everything built so
// far. When loss_curve is given, the mean training logloss after each new
// tree is appended to it.
Ensemble train(const Dataset& data, const TrainConfig& config,
               const Ensemble* base = nullptr,
               std::vector<double>* loss_curve = nullptr);

double predict_margin(const Ensemble& model, std::span<const double> x);
double predict_prob(const Ensemble& model, std::span<const double> x);
std::vector<double> predict_margins(const Ensemble& model, const Dataset& data);

double mean_logloss(const Ensemble& model, const Dataset& data);

}  // namespace driftboost
