#include "driftboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "driftboost/text.hpp"

namespace driftboost {

namespace {

void check_scored_input(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    if (scores.empty()) throw std::invalid_argument("empty input");
    for (double s : scores)
        if (!std::isfinite(s)) throw std::invalid_argument("non-finite score");
    for (int y : labels)
        if (y != 0 && y != 1) throw std::invalid_argument("label not binary");
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_scored_input(scores, labels);
    const std::size_t n = scores.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });

    // average ranks across tie runs, 1-based
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (labels[k] == 1) {
            pos_rank_sum += rank[k];
            ++n_pos;
        }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("AUC needs both classes present");

    const double u = pos_rank_sum -
                     static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double top_recall(std::span<const double> scores, std::span<const int> labels,
                  double fraction) {
    check_scored_input(scores, labels);
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("fraction must lie in (0,1]");
    const std::size_t n = scores.size();
    const std::size_t total_pos = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), 1));
    if (total_pos == 0) throw std::invalid_argument("top_recall needs at least one positive");

    // k = ceil(fraction*n); the tiny shift keeps exact products like 1e-4*10000
    // from spilling over to the next integer
    auto k = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::size_t hit = 0;
    for (std::size_t idx = 0; idx < k; ++idx) hit += labels[order[idx]] == 1 ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(total_pos);
}

double information_value(std::span<const double> values,
                         std::span<const int> labels, int bins) {
    check_scored_input(values, labels);
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    const std::size_t n = values.size();

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    // equal-frequency edges; integer arithmetic keeps ranks exact
    std::vector<double> edges;
    for (int b = 1; b < bins; ++b) {
        const std::size_t rank =
            (static_cast<std::size_t>(b) * n + static_cast<std::size_t>(bins) - 1) /
                static_cast<std::size_t>(bins) -
            1;
        edges.push_back(sorted[rank]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const std::size_t bin_count = edges.size() + 1;

    std::vector<double> pos(bin_count, 0.0), neg(bin_count, 0.0);
    double total_pos = 0.0, total_neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // bin index = number of edges strictly below the value, so equal
        // values always share a bin
        const std::size_t bin = static_cast<std::size_t>(
            std::lower_bound(edges.begin(), edges.end(), values[i]) - edges.begin());
        if (labels[i] == 1) {
            pos[bin] += 1.0;
            total_pos += 1.0;
        } else {
            neg[bin] += 1.0;
            total_neg += 1.0;
        }
    }
    if (total_pos == 0.0 || total_neg == 0.0)
        throw std::invalid_argument("information value needs both classes present");

    // 0.5 pseudo-count per class per bin
    const double pos_denom = total_pos + 0.5 * static_cast<double>(bin_count);
    const double neg_denom = total_neg + 0.5 * static_cast<double>(bin_count);
    double iv = 0.0;
    for (std::size_t b = 0; b < bin_count; ++b) {
        const double ps = (pos[b] + 0.5) / pos_denom;
        const double ns = (neg[b] + 0.5) / neg_denom;
        iv += (ps - ns) * std::log(ps / ns);
    }
    return iv;
}

double quantile_nearest_rank(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty()) throw std::invalid_argument("empty sample");
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in (0,1]");
    const auto n = static_cast<double>(sorted_values.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted_values.size());
    return sorted_values[rank - 1];
}

DriftReport drift_report(const Dataset& source, const Dataset& target, int bins) {
    if (source.feature_names() != target.feature_names())
        throw std::invalid_argument("feature-space mismatch between domains");
    const std::size_t d = source.feature_count();

    std::vector<FeatureDriftRow> rows(d);
    std::vector<double> iv_s(d), iv_t(d);
    for (std::size_t f = 0; f < d; ++f) {
        FeatureDriftRow& row = rows[f];
        row.name = source.feature_names()[f];

        std::vector<double> col_s = source.column(f);
        std::vector<double> col_t = target.column(f);
        std::sort(col_s.begin(), col_s.end());
        std::sort(col_t.begin(), col_t.end());
        for (int q = 1; q <= 9; ++q) {
            row.deciles_s[q - 1] = quantile_nearest_rank(col_s, q / 10.0);
            row.deciles_t[q - 1] = quantile_nearest_rank(col_t, q / 10.0);
        }
        iv_s[f] = information_value(source.column(f), source.labels(), bins);
        iv_t[f] = information_value(target.column(f), target.labels(), bins);
        row.iv_s = iv_s[f];
        row.iv_t = iv_t[f];
    }

    // descending IV, ties toward the lower feature index
    auto assign_ranks = [d](const std::vector<double>& iv, auto setter) {
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (iv[a] != iv[b]) return iv[a] > iv[b];
            return a < b;
        });
        for (std::size_t pos = 0; pos < d; ++pos)
            setter(order[pos], static_cast<int>(pos) + 1);
    };
    assign_ranks(iv_s, [&](std::size_t f, int rank) { rows[f].rank_s = rank; });
    assign_ranks(iv_t, [&](std::size_t f, int rank) { rows[f].rank_t = rank; });
    for (auto& row : rows) row.rank_diff = std::abs(row.rank_s - row.rank_t);

    std::sort(rows.begin(), rows.end(), [](const FeatureDriftRow& a,
                                           const FeatureDriftRow& b) {
        return a.rank_s < b.rank_s;
    });

    DriftReport report;
    report.rows = std::move(rows);
    return report;
}

std::string drift_report_table(const DriftReport& report) {
    std::string out = "feat_id\tIV_s\trank_s\tIV_t\trank_t\trank_diff\n";
    for (const FeatureDriftRow& row : report.rows) {
        out += row.name;
        out += '\t' + format_double(row.iv_s);
        out += '\t' + std::to_string(row.rank_s);
        out += '\t' + format_double(row.iv_t);
        out += '\t' + std::to_string(row.rank_t);
        out += '\t' + std::to_string(row.rank_diff);
        out += '\n';
    }
    return out;
}

}  // namespace driftboost
