#include "driftboost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "driftboost/text.hpp"

namespace driftboost {

Dataset::Dataset(std::vector<double> features, std::vector<int> labels,
                 std::vector<std::string> feature_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
    row_count_ = labels_.size();
    feature_count_ = feature_names_.size();
    if (row_count_ == 0) throw std::invalid_argument("empty dataset");
    if (feature_count_ == 0) throw std::invalid_argument("dataset has no features");
    if (features_.size() != row_count_ * feature_count_)
        throw std::invalid_argument("feature matrix size does not match rows x columns");
    for (double v : features_)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature");
    for (int y : labels_)
        if (y != 0 && y != 1) throw std::invalid_argument("label not binary");
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names_) {
        if (name.empty()) throw std::invalid_argument("empty feature name");
        if (name.find(',') != std::string::npos || name.find('\n') != std::string::npos)
            throw std::invalid_argument("feature name contains a delimiter: " + name);
        if (!seen.insert(name).second)
            throw std::invalid_argument("duplicate feature name: " + name);
    }
}

std::vector<double> Dataset::column(std::size_t col) const {
    std::vector<double> out(row_count_);
    for (std::size_t r = 0; r < row_count_; ++r) out[r] = feature(r, col);
    return out;
}

std::size_t Dataset::positive_count() const {
    std::size_t p = 0;
    for (int y : labels_) p += static_cast<std::size_t>(y);
    return p;
}

double Dataset::bad_rate() const {
    return static_cast<double>(positive_count()) / static_cast<double>(row_count_);
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    std::vector<double> feats;
    feats.reserve(rows.size() * feature_count_);
    std::vector<int> labs;
    labs.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= row_count_) throw std::out_of_range("row index out of range");
        auto row_span = row(r);
        feats.insert(feats.end(), row_span.begin(), row_span.end());
        labs.push_back(labels_[r]);
    }
    return Dataset(std::move(feats), std::move(labs), feature_names_);
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    std::vector<std::string> header;
    for (auto cell : split(trim(line), ',')) header.emplace_back(trim(cell));

    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) {
            label_idx = i;
            break;
        }
    if (label_idx == header.size())
        throw std::runtime_error("label column '" + label_column + "' not found in " + path);

    std::vector<std::string> names;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != label_idx) names.push_back(header[i]);

    std::vector<double> feats;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto trimmed = trim(line);
        if (trimmed.empty()) continue;
        auto cells = split(trimmed, ',');
        if (cells.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double v;
            if (!parse_double(trim(cells[i]), v))
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-numeric cell '" + std::string(cells[i]) + "'");
            if (i == label_idx) {
                if (v != 0.0 && v != 1.0)
                    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                             ": label not binary");
                labels.push_back(v == 1.0 ? 1 : 0);
            } else {
                if (!std::isfinite(v))
                    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                             ": non-finite feature");
                feats.push_back(v);
            }
        }
    }
    if (labels.empty()) throw std::runtime_error("empty dataset: " + path);
    return Dataset(std::move(feats), std::move(labels), std::move(names));
}

void write_csv(const Dataset& data, const std::string& path,
               const std::string& label_column) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (std::size_t c = 0; c < data.feature_count(); ++c)
        out << data.feature_names()[c] << ',';
    out << label_column << '\n';
    for (std::size_t r = 0; r < data.row_count(); ++r) {
        for (std::size_t c = 0; c < data.feature_count(); ++c)
            out << format_double(data.feature(r, c)) << ',';
        out << data.label(r) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset negative_sample(const Dataset& data, double target_bad_rate,
                        std::uint64_t seed) {
    if (!(target_bad_rate > 0.0 && target_bad_rate <= 1.0))
        throw std::invalid_argument("target_bad_rate must lie in (0,1]");
    const std::size_t pos = data.positive_count();
    if (pos == 0) throw std::invalid_argument("negative sampling needs at least one positive");
    if (target_bad_rate < data.bad_rate())
        throw std::invalid_argument("target_bad_rate below current bad rate");

    const std::size_t neg = data.row_count() - pos;
    const double p = static_cast<double>(pos);
    // largest negative count that keeps pos/(pos+k) >= target rate
    std::size_t keep = static_cast<std::size_t>(p * (1.0 - target_bad_rate) / target_bad_rate);
    keep = std::min(keep, neg);
    while (keep + 1 <= neg && p / (p + static_cast<double>(keep + 1)) >= target_bad_rate)
        ++keep;
    while (keep > 0 && p / (p + static_cast<double>(keep)) < target_bad_rate) --keep;

    std::vector<std::size_t> neg_rows;
    neg_rows.reserve(neg);
    for (std::size_t r = 0; r < data.row_count(); ++r)
        if (data.label(r) == 0) neg_rows.push_back(r);

    // partial Fisher-Yates picks `keep` negatives without replacement
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < keep; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, neg_rows.size() - 1);
        std::swap(neg_rows[i], neg_rows[pick(rng)]);
    }
    neg_rows.resize(keep);

    std::vector<std::size_t> rows;
    rows.reserve(pos + keep);
    for (std::size_t r = 0; r < data.row_count(); ++r)
        if (data.label(r) == 1) rows.push_back(r);
    rows.insert(rows.end(), neg_rows.begin(), neg_rows.end());
    std::sort(rows.begin(), rows.end());
    return data.subset(rows);
}

}  // namespace driftboost
