#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "falldet/segmentation.hpp"
#include "falldet/types.hpp"

namespace falldet {

/// Layout of the interval-quantile feature map. For each enabled
/// representation (raw window, first difference) and each dyadic interval at
/// depths 0..depth, the extractor emits quantiles_per_interval equally spaced
/// empirical quantiles, so the feature count is
///   sum_{d=0..depth} 2^d  *  quantiles_per_interval  *  n_representations.
struct FeatureSpec {
    int depth = 4;
    int quantiles_per_interval = 4;
    bool use_raw = true;
    bool use_first_difference = true;

    int representation_count() const {
        return (use_raw ? 1 : 0) + (use_first_difference ? 1 : 0);
    }

    Index feature_count() const {
        const Index intervals = (Index{1} << (depth + 1)) - 1;
        return intervals * quantiles_per_interval * representation_count();
    }
};

using FeatureVector = Vec;

/// Extract the interval-quantile feature vector of a standardized window.
/// Feature order is representation-major, then depth, then interval, then
/// quantile; the order is part of the model file contract.
/// Throws FeatureSpecError when the spec is invalid or the window (or its
/// first difference) is shorter than 2^depth.
FeatureVector extract_features(const Window& win, const FeatureSpec& spec);

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    Scalar threshold = 0.0;     // x[feature] < threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    Scalar fall_fraction = 0.0;  // class-1 frequency of the training samples here
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    Scalar predict(const Eigen::Ref<const Vec>& features) const {
        std::int32_t at = 0;
        while (nodes[at].feature >= 0) {
            const TreeNode& n = nodes[at];
            at = features[n.feature] < n.threshold ? n.left : n.right;
        }
        return nodes[at].fall_fraction;
    }
};

/// Trained window classifier: feature spec plus an ensemble of extremely
/// randomized trees with per-leaf class frequencies. Immutable after fit;
/// concurrent predict_proba calls are safe.
struct IntervalQuantileModel {
    FeatureSpec spec;
    std::vector<DecisionTree> trees;
    double w_seconds = 0.0;
    int fs = 0;
    std::uint32_t version = 1;

    int n_trees() const { return static_cast<int>(trees.size()); }
    Index window_samples() const {
        return static_cast<Index>(w_seconds * fs + 0.5);
    }
};

inline constexpr int kDefaultTreeCount = 200;

/// Train the ensemble on a standardized training set. Deterministic given the
/// seed, regardless of n_threads. Throws DegenerateTrainingError when the set
/// contains a single class.
IntervalQuantileModel fit(const TrainingSet& ts, const FeatureSpec& spec,
                          int n_trees, std::uint64_t seed, int n_threads = 1);

/// Mean per-tree leaf fall-frequency for one standardized window.
/// Throws ShapeError when the window length does not match the model.
Scalar predict_proba(const IntervalQuantileModel& model, const Window& win);

/// Same, for a feature vector that was extracted already (hot path).
Scalar predict_proba_features(const IntervalQuantileModel& model,
                              const Eigen::Ref<const Vec>& features);

void save(const IntervalQuantileModel& model, std::ostream& out);
void save_file(const IntervalQuantileModel& model, const std::string& path);

/// Throws VersionError on an unsupported format version and CorruptModelError
/// on truncated or malformed payloads.
IntervalQuantileModel load(std::istream& in);
IntervalQuantileModel load_file(const std::string& path);

}  // namespace falldet
