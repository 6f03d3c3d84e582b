#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace driftboost {

// Dense feature matrix with binary labels. Immutable after construction;
// loaders and samplers return new instances, so sharing across threads for
// reads is safe.
class Dataset {
public:
    // features is row-major with labels.size() rows and feature_names.size()
    // columns. Throws std::invalid_argument when any invariant fails:
    // non-finite feature, label outside {0,1}, empty data, duplicate names.
    Dataset(std::vector<double> features, std::vector<int> labels,
            std::vector<std::string> feature_names);

    std::size_t row_count() const { return row_count_; }
    std::size_t feature_count() const { return feature_count_; }

    double feature(std::size_t row, std::size_t col) const {
        return features_[row * feature_count_ + col];
    }
    std::span<const double> row(std::size_t r) const {
        return {features_.data() + r * feature_count_, feature_count_};
    }
    int label(std::size_t r) const { return labels_[r]; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    std::vector<double> column(std::size_t col) const;
    std::size_t positive_count() const;
    double bad_rate() const;

    // New dataset holding the given rows in the given order.
    Dataset subset(const std::vector<std::size_t>& rows) const;

private:
    std::vector<double> features_;  // row-major
    std::vector<int> labels_;
    std::vector<std::string> feature_names_;
    std::size_t row_count_ = 0;
    std::size_t feature_count_ = 0;
};

// CSV with a header row; the label column may sit anywhere, remaining columns
// become features in header order. Values must be finite, labels in {0,1}.
Dataset load_csv(const std::string& path, const std::string& label_column = "label");

// Inverse of load_csv: features in shortest round-trip notation, labels 0/1,
// label column written last.
void write_csv(const Dataset& data, const std::string& path,
               const std::string& label_column = "label");

// Keeps every positive row and uniformly subsamples negatives (without
// replacement, order preserved) so the resulting bad rate is the closest
// achievable value >= target_bad_rate. Deterministic for a given seed.
Dataset negative_sample(const Dataset& data, double target_bad_rate,
                        std::uint64_t seed);

}  // namespace driftboost
