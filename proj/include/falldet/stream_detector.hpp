#pragma once

#include <cstddef>
#include <vector>

#include "falldet/classifier.hpp"
#include "falldet/types.hpp"

namespace falldet {

/// One probability per grid window (1 s step by default).
struct WindowProbSeq {
    std::vector<Scalar> probs;
    double step_seconds = 1.0;
    double w_seconds = 0.0;
    int fs = 0;  // carried so window indices convert back to sample indices

    Index n_windows() const { return static_cast<Index>(probs.size()); }
};

/// Per-sample fall probability, aligned 1:1 with the raw signal.
struct ConfidenceMap {
    Array probs;
};

/// One deduplicated detection: the earliest window that attains the maximum
/// probability of its high-confidence region.
struct Detection {
    Index start_index = 0;  // sample index of the detected window, on the step grid
    Scalar prob = 0.0;
    double w_seconds = 0.0;
};

/// Incremental window scorer. Samples arrive in chunks of any size; each grid
/// window is scored exactly once, as soon as its last sample is available, and
/// no sample beyond the current window is ever read. Results are therefore
/// bit-identical for every chunking of the same signal.
///
/// Per window: unless the raw magnitude over the impact sub-interval (seconds
/// [1, 2) of the window) exceeds gate_g, the window gets probability 0 without
/// invoking the model; otherwise the standardized window is scored.
class StreamingScorer {
public:
    StreamingScorer(const IntervalQuantileModel& model, Scalar gate_g = kDefaultGateG,
                    double step_seconds = 1.0);

    void push(const Scalar* samples, Index count);
    void push(const Eigen::Ref<const Array>& samples) { push(samples.data(), samples.size()); }

    /// Windows scored so far. Throws TooShortError if the stream never
    /// reached a full window.
    WindowProbSeq finish() const;

    std::size_t model_invocations() const { return model_invocations_; }
    Index samples_seen() const { return total_seen_; }

private:
    void score_ready_windows();

    const IntervalQuantileModel& model_;
    Scalar gate_g_;
    Index window_len_;
    Index step_len_;
    Index gate_begin_;  // relative to window start
    Index gate_end_;

    std::vector<Scalar> buffer_;
    Index buffer_base_ = 0;  // absolute index of buffer_[0]
    Index next_start_ = 0;   // absolute start of the next window to score
    Index total_seen_ = 0;
    std::size_t model_invocations_ = 0;
    WindowProbSeq out_;
};

/// Whole-signal convenience wrapper around StreamingScorer.
/// Throws TooShortError when the signal is shorter than one window.
WindowProbSeq window_probabilities(const IntervalQuantileModel& model, const Signal& sig,
                                   Scalar gate_g = kDefaultGateG,
                                   std::size_t* model_invocations = nullptr);

/// Max-aggregate window probabilities at 1 s resolution and broadcast to all
/// samples: each 1 s time point takes the maximum probability over the grid
/// windows containing it; samples in a trailing partial second carry the last
/// time point's value forward.
ConfidenceMap confidence_map(const WindowProbSeq& wp, Index n_samples, int fs);

/// Threshold the window probabilities and deduplicate: maximal runs of
/// consecutive windows with prob >= tau form high-confidence regions, and each
/// region yields one Detection at its earliest maximum. tau must be in (0, 1].
std::vector<Detection> detect(const WindowProbSeq& wp, Scalar tau);

}  // namespace falldet
