#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "driftboost/dataset.hpp"

namespace driftboost {

// Rank-based AUC with average ranks for ties: the probability that a random
// positive outscores a random negative, ties counted 1/2. Needs both classes.
double auc(std::span<const double> scores, std::span<const int> labels);

// Recall within the top ceil(fraction*n) scores; the cutoff orders by score
// descending, then original index ascending. Needs at least one positive.
double top_recall(std::span<const double> scores, std::span<const int> labels,
                  double fraction);

// Information Value with equal-frequency bins (duplicate bin edges collapse)
// and 0.5 pseudo-counts per class per bin. Needs both classes; bins >= 2.
double information_value(std::span<const double> values,
                         std::span<const int> labels, int bins = 10);

// Nearest-rank (lower) empirical quantile; values must be sorted ascending.
double quantile_nearest_rank(std::span<const double> sorted_values, double q);

struct FeatureDriftRow {
    std::string name;
    std::array<double, 9> deciles_s{};  // q10..q90
    std::array<double, 9> deciles_t{};
    double iv_s = 0.0;
    double iv_t = 0.0;
    int rank_s = 0;  // 1 = highest IV in the domain
    int rank_t = 0;
    int rank_diff = 0;
};

struct DriftReport {
    std::vector<FeatureDriftRow> rows;  // sorted by rank_s ascending
};

// Per-feature deciles and IVs on both domains plus descending IV ranks
// (ties toward the lower feature index). Domains must share feature names.
DriftReport drift_report(const Dataset& source, const Dataset& target,
                         int bins = 10);

// Tab-separated: feat_id, IV_s, rank_s, IV_t, rank_t, rank_diff.
std::string drift_report_table(const DriftReport& report);

}  // namespace driftboost
