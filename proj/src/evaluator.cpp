#include "falldet/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "falldet/errors.hpp"

namespace falldet {

namespace {

double overlap_length(const TimeInterval& a, const TimeInterval& b) {
    return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

TimeInterval detection_interval(const Detection& det, int fs) {
    const double start = static_cast<double>(det.start_index) / fs;
    return {start, start + det.w_seconds};
}

}  // namespace

ToleranceWindow tolerance_window(double impact_seconds, double w_seconds,
                                 double tolerance_seconds, double signal_end_seconds) {
    ToleranceWindow tw;
    tw.impact_seconds = impact_seconds;
    tw.interval.lo = std::max(0.0, impact_seconds - (w_seconds + tolerance_seconds));
    tw.interval.hi = std::min(signal_end_seconds, impact_seconds + tolerance_seconds);
    return tw;
}

double iou(const TimeInterval& a, const TimeInterval& b) {
    if (!(a.length() > 0.0) || !(b.length() > 0.0)) {
        throw DomainError("iou of an empty interval");
    }
    const double inter = overlap_length(a, b);
    const double uni = a.length() + b.length() - inter;
    return inter / uni;
}

MatchResult match(const std::vector<Detection>& detections,
                  const std::vector<ToleranceWindow>& falls, int fs, Index n_grid_steps) {
    // Sorted copies: first-match semantics are defined on time order.
    std::vector<Detection> dets = detections;
    std::sort(dets.begin(), dets.end(),
              [](const Detection& a, const Detection& b) { return a.start_index < b.start_index; });
    std::vector<ToleranceWindow> gt = falls;
    std::sort(gt.begin(), gt.end(), [](const ToleranceWindow& a, const ToleranceWindow& b) {
        return a.impact_seconds < b.impact_seconds;
    });

    MatchResult res;
    std::vector<bool> matched(gt.size(), false);

    for (const auto& det : dets) {
        const TimeInterval d = detection_interval(det, fs);
        bool overlaps_any = false;
        for (std::size_t j = 0; j < gt.size(); ++j) {
            if (overlap_length(d, gt[j].interval) <= 0.0) continue;
            overlaps_any = true;
            if (!matched[j]) {
                matched[j] = true;
                ++res.counts.tp;
                res.delays.push_back(d.lo - gt[j].impact_seconds);
                break;
            }
            // Surplus detections of an already-matched fall are discarded.
        }
        if (!overlaps_any) ++res.counts.fp;
    }

    for (const bool m : matched) {
        if (!m) ++res.counts.fn;
    }

    // TN universe: 1 s decision grid steps outside every tolerance window that
    // produced no detection.
    std::vector<bool> fired(static_cast<std::size_t>(std::max<Index>(n_grid_steps, 0)), false);
    for (const auto& det : dets) {
        const Index g = det.start_index / fs;
        if (g >= 0 && g < n_grid_steps) fired[static_cast<std::size_t>(g)] = true;
    }
    for (Index g = 0; g < n_grid_steps; ++g) {
        const double t = static_cast<double>(g);
        bool inside = false;
        for (const auto& fall : gt) {
            if (fall.interval.contains(t)) {
                inside = true;
                break;
            }
        }
        if (!inside && !fired[static_cast<std::size_t>(g)]) ++res.counts.tn;
    }
    return res;
}

double detection_delay(const Detection& det, const ToleranceWindow& fall, int fs) {
    const TimeInterval d = detection_interval(det, fs);
    if (overlap_length(d, fall.interval) <= 0.0) {
        throw ContractError("detection does not overlap the fall's tolerance window");
    }
    return d.lo - fall.impact_seconds;
}

MetricRatios metrics(const ConfusionCounts& c) {
    MetricRatios r;
    auto ratio = [&r](std::int64_t num, std::int64_t den) {
        if (den == 0) {
            r.degenerate = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    r.specificity = ratio(c.tn, c.tn + c.fp);
    if (r.precision + r.recall > 0.0) {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    } else {
        r.f1 = 0.0;
        r.degenerate = true;
    }
    r.balanced_accuracy = 0.5 * (r.recall + r.specificity);
    return r;
}

void accumulate(EvalReport& report, const MatchResult& part) {
    report.counts.tp += part.counts.tp;
    report.counts.fp += part.counts.fp;
    report.counts.fn += part.counts.fn;
    report.counts.tn += part.counts.tn;
    report.delays.insert(report.delays.end(), part.delays.begin(), part.delays.end());
}

}  // namespace falldet
