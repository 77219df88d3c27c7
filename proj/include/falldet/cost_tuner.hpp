#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falldet/classifier.hpp"
#include "falldet/evaluator.hpp"
#include "falldet/types.hpp"

namespace falldet {

/// 2x2 misclassification gain matrix; rows index the true class, columns the
/// predicted class, class order {fall, adl}. Diagonal is zero, off-diagonals
/// non-positive. The default cost ratio of 2 makes a missed fall twice as
/// expensive as a false alarm.
class GainMatrix {
public:
    GainMatrix() : GainMatrix(2) {}

    explicit GainMatrix(int fn_over_fp_cost_ratio) {
        m_ << 0, -fn_over_fp_cost_ratio, -1, 0;
        validate();
    }

    GainMatrix(int fn_cost, int fp_cost) {
        m_ << 0, fn_cost, fp_cost, 0;
        validate();
    }

    /// Gain contribution of one false negative (true fall predicted adl).
    int fn_gain() const { return m_(0, 1); }
    /// Gain contribution of one false positive (true adl predicted fall).
    int fp_gain() const { return m_(1, 0); }

    const Eigen::Matrix2i& matrix() const { return m_; }

private:
    void validate() const;
    Eigen::Matrix2i m_;
};

/// Total gain of an evaluation: fp * G[adl][fall] + fn * G[fall][adl].
/// Always <= 0; equals 0 iff there are no misclassifications.
/// Throws DomainError on negative counts.
std::int64_t gain(std::int64_t fp, std::int64_t fn, const GainMatrix& g = GainMatrix{});

/// Evenly spaced threshold grid. The endpoints stay strictly inside (0, 1):
/// the default 100-point grid spans [0.005, 0.995] in steps of 0.01.
std::vector<double> threshold_grid(int n_points = 100);

struct GainCurve {
    std::vector<double> thresholds;
    std::vector<double> mean_gain;  // fold-averaged gain per threshold
    double best_tau = 0.0;
};

/// Argmax over the curve; ties break toward the largest threshold.
double select_best_tau(const std::vector<double>& thresholds,
                       const std::vector<double>& mean_gain);

/// Assign subjects to folds: every subject lands in exactly one fold, sizes
/// differ by at most one, deterministic given the seed.
/// Throws SplitError when there are fewer distinct subjects than folds.
std::vector<std::vector<std::string>> fold_split(const std::vector<std::string>& subject_ids,
                                                 int folds, std::uint64_t seed);

struct TuneConfig {
    double w_seconds = 10.0;
    double step_seconds = 1.0;
    double tolerance_seconds = kDefaultToleranceSeconds;
    Scalar gate_g = kDefaultGateG;
    double guard_seconds = kDefaultGuardSeconds;
    int folds = 5;
    int grid_points = 100;
    FeatureSpec spec;
    int n_trees = kDefaultTreeCount;
    GainMatrix gain_matrix;
    std::uint64_t seed = 0;
    int n_threads = 1;
};

/// Cost-sensitive threshold selection: participant-wise cross-validation,
/// streaming detection on each fold's held-out signals, false positives and
/// false negatives pooled across folds per threshold, best_tau at the highest
/// mean gain (ties toward the largest threshold).
GainCurve tune_threshold(const std::vector<Signal>& signals, const TuneConfig& cfg);

}  // namespace falldet
