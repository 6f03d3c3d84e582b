#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "driftboost/dataset.hpp"

namespace driftboost {

// Base population: iid standard normal features, label drawn from a logistic
// rule over a few informative columns. Coefficient magnitudes control how
// separable the classes are.
struct GeneratorSpec {
    std::size_t feature_count = 10;
    std::vector<std::size_t> informative = {0, 1, 2};
    std::vector<double> coefficients = {3.0, -2.5, 2.0};
    double intercept = -1.0;

    void validate() const;
};

enum class DriftMode { scale, shape, efficacy_loss, label_drift };

struct AffineDrift {
    double scale = 1.0;   // must stay > 0 so the transform is monotone
    double offset = 0.0;
};

// Value is replaced by one of two affine images of itself, picked at random;
// the marginal turns into a mixture and changes shape.
struct MixtureDrift {
    double weight = 0.5;  // probability of the first component
    AffineDrift first;
    AffineDrift second;
};

struct DriftSpec {
    DriftMode mode = DriftMode::scale;
    std::map<std::size_t, AffineDrift> scale_params;     // scale mode
    std::map<std::size_t, MixtureDrift> shape_params;    // shape mode
    std::map<std::size_t, double> noise_levels;          // efficacy_loss mode, in [0,1]
    double label_flip_rate = 0.0;  // composes with any feature mode
    std::uint64_t seed = 0;

    void validate() const;
    static DriftSpec identity(std::uint64_t seed = 0);
};

// Draws a source dataset from the base population and a target dataset from
// the same population with the drift transforms applied. Labels always follow
// the base rule on pre-drift feature values, then optional flips. The two
// datasets share feature names f0..f{d-1}.
std::pair<Dataset, Dataset> synth_domain_pair(const GeneratorSpec& base_spec,
                                              const DriftSpec& drift,
                                              std::size_t n_source,
                                              std::size_t n_target);

}  // namespace driftboost
