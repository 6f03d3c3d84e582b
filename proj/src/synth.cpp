#include "driftboost/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace driftboost {

void GeneratorSpec::validate() const {
    if (feature_count == 0) throw std::invalid_argument("feature_count must be positive");
    if (informative.empty()) throw std::invalid_argument("need at least one informative feature");
    if (informative.size() != coefficients.size())
        throw std::invalid_argument("informative features and coefficients differ in length");
    for (std::size_t idx : informative)
        if (idx >= feature_count)
            throw std::invalid_argument("informative feature index out of range");
}

void DriftSpec::validate() const {
    for (const auto& [idx, affine] : scale_params) {
        (void)idx;
        if (!(affine.scale > 0.0))
            throw std::invalid_argument("scale drift needs a strictly positive scale");
    }
    for (const auto& [idx, mix] : shape_params) {
        (void)idx;
        if (!(mix.weight >= 0.0 && mix.weight <= 1.0))
            throw std::invalid_argument("mixture weight must lie in [0,1]");
    }
    for (const auto& [idx, level] : noise_levels) {
        (void)idx;
        if (!(level >= 0.0 && level <= 1.0))
            throw std::invalid_argument("noise level must lie in [0,1]");
    }
    if (!(label_flip_rate >= 0.0 && label_flip_rate < 0.5))
        throw std::invalid_argument("label flip rate must lie in [0, 0.5)");
}

DriftSpec DriftSpec::identity(std::uint64_t seed) {
    DriftSpec spec;
    spec.mode = DriftMode::scale;
    spec.seed = seed;
    return spec;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct RowDraw {
    std::vector<double> features;
    int label;
};

RowDraw draw_base_row(const GeneratorSpec& spec, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RowDraw row;
    row.features.resize(spec.feature_count);
    for (double& v : row.features) v = normal(rng);
    double z = spec.intercept;
    for (std::size_t k = 0; k < spec.informative.size(); ++k)
        z += spec.coefficients[k] * row.features[spec.informative[k]];
    row.label = unif(rng) < sigmoid(z) ? 1 : 0;
    return row;
}

void apply_feature_drift(const DriftSpec& drift, std::vector<double>& features,
                         std::mt19937_64& rng) {
    switch (drift.mode) {
        case DriftMode::scale:
            for (const auto& [idx, affine] : drift.scale_params) {
                if (idx >= features.size())
                    throw std::invalid_argument("drift feature index out of range");
                features[idx] = affine.scale * features[idx] + affine.offset;
            }
            break;
        case DriftMode::shape: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (const auto& [idx, mix] : drift.shape_params) {
                if (idx >= features.size())
                    throw std::invalid_argument("drift feature index out of range");
                const AffineDrift& comp = unif(rng) < mix.weight ? mix.first : mix.second;
                features[idx] = comp.scale * features[idx] + comp.offset;
            }
            break;
        }
        case DriftMode::efficacy_loss: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (const auto& [idx, level] : drift.noise_levels) {
                if (idx >= features.size())
                    throw std::invalid_argument("drift feature index out of range");
                // keeps the standard-normal marginal while decorrelating the
                // value from the label rule
                features[idx] = std::sqrt(1.0 - level * level) * features[idx] +
                                level * normal(rng);
            }
            break;
        }
        case DriftMode::label_drift:
            break;  // features untouched
    }
}

Dataset draw_dataset(const GeneratorSpec& spec, const DriftSpec* drift,
                     std::size_t n, std::mt19937_64& rng,
                     const std::vector<std::string>& names) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> feats;
    feats.reserve(n * spec.feature_count);
    std::vector<int> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RowDraw row = draw_base_row(spec, rng);
        int label = row.label;
        if (drift != nullptr) {
            apply_feature_drift(*drift, row.features, rng);
            if (drift->label_flip_rate > 0.0 && unif(rng) < drift->label_flip_rate)
                label = 1 - label;
        }
        feats.insert(feats.end(), row.features.begin(), row.features.end());
        labels.push_back(label);
    }
    return Dataset(std::move(feats), std::move(labels), names);
}

}  // namespace

std::pair<Dataset, Dataset> synth_domain_pair(const GeneratorSpec& base_spec,
                                              const DriftSpec& drift,
                                              std::size_t n_source,
                                              std::size_t n_target) {
    base_spec.validate();
    drift.validate();
    if (n_source == 0 || n_target == 0)
        throw std::invalid_argument("domain sizes must be positive");

    std::vector<std::string> names;
    names.reserve(base_spec.feature_count);
    for (std::size_t i = 0; i < base_spec.feature_count; ++i)
        names.push_back("f" + std::to_string(i));

    // independent streams so changing one domain's size leaves the other's
    // draws untouched
    std::mt19937_64 source_rng(drift.seed * 2654435761u + 1);
    std::mt19937_64 target_rng(drift.seed * 2654435761u + 2);
    Dataset source = draw_dataset(base_spec, nullptr, n_source, source_rng, names);
    Dataset target = draw_dataset(base_spec, &drift, n_target, target_rng, names);
    return {std::move(source), std::move(target)};
}

}  // namespace driftboost
