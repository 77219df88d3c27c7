#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "falldet/stream_detector.hpp"
#include "falldet/types.hpp"

namespace falldet {

/// Half-open time interval [lo, hi) in seconds.
struct TimeInterval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double t) const { return lo <= t && t < hi; }
};

/// Asymmetric acceptance interval around an annotated impact:
/// [f - (w + t), f + t), clipped to the recording. Detections anywhere inside
/// count as hits, so early detections up to w + t seconds before impact and
/// late ones up to t seconds after are accepted.
struct ToleranceWindow {
    TimeInterval interval;
    double impact_seconds = 0.0;
};

inline constexpr double kDefaultToleranceSeconds = 20.0;

ToleranceWindow tolerance_window(double impact_seconds, double w_seconds, double tolerance_seconds,
                                 double signal_end_seconds = std::numeric_limits<double>::infinity());

/// Intersection over union of two non-empty intervals.
/// Throws DomainError when either interval is empty.
double iou(const TimeInterval& a, const TimeInterval& b);

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;
};

struct MatchResult {
    ConfusionCounts counts;
    std::vector<double> delays;  // one entry per matched fall, seconds
};

/// Match detections against ground-truth tolerance windows on one signal.
/// A detection window d = [p, p + w) that overlaps an unmatched tolerance
/// window is the fall's (single) true positive and contributes its delay;
/// further detections of the same fall are discarded; detections overlapping
/// nothing are false positives; unmatched falls are false negatives.
/// True negatives count the 1 s grid steps outside every tolerance window
/// that produced no detection; pass the step count the detector scanned.
MatchResult match(const std::vector<Detection>& detections,
                  const std::vector<ToleranceWindow>& falls, int fs, Index n_grid_steps);

/// Signed delay of a matched detection: window start minus impact, seconds.
/// Negative means the detected window begins before the impact.
/// Throws ContractError when the detection does not overlap the fall.
double detection_delay(const Detection& det, const ToleranceWindow& fall, int fs);

struct MetricRatios {
    double precision = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    double balanced_accuracy = 0.0;
    bool degenerate = false;  // some ratio hit 0/0 and was reported as 0
};

MetricRatios metrics(const ConfusionCounts& counts);

struct EvalReport {
    ConfusionCounts counts;
    MetricRatios ratios;
    std::vector<double> delays;
    double gain = 0.0;
};

/// Accumulate a per-signal match result into a running report (counts and
/// delays add; ratios and gain are recomputed by finalize_report).
void accumulate(EvalReport& report, const MatchResult& part);

}  // namespace falldet
