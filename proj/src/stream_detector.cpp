#include "falldet/stream_detector.hpp"

#include <algorithm>
#include <cmath>

#include "falldet/errors.hpp"
#include "falldet/signal_core.hpp"

namespace falldet {

StreamingScorer::StreamingScorer(const IntervalQuantileModel& model, Scalar gate_g,
                                 double step_seconds)
    : model_(model), gate_g_(gate_g) {
    window_len_ = model.window_samples();
    step_len_ = static_cast<Index>(std::llround(step_seconds * model.fs));
    if (window_len_ <= 0 || step_len_ <= 0) {
        throw DomainError("window and step must be positive");
    }
    gate_begin_ = std::min<Index>(model.fs, window_len_);
    gate_end_ = std::min<Index>(2 * static_cast<Index>(model.fs), window_len_);
    if (gate_end_ <= gate_begin_) {
        throw DomainError("window too short for the impact-second gate (needs w > 1 s)");
    }

    out_.step_seconds = step_seconds;
    out_.w_seconds = model.w_seconds;
    out_.fs = model.fs;
}

void StreamingScorer::push(const Scalar* samples, Index count) {
    if (count <= 0) return;
    buffer_.insert(buffer_.end(), samples, samples + count);
    total_seen_ += count;
    score_ready_windows();
}

void StreamingScorer::score_ready_windows() {
    while (next_start_ + window_len_ <= buffer_base_ + static_cast<Index>(buffer_.size())) {
        const Index rel = next_start_ - buffer_base_;
        const Eigen::Map<const Array> win_raw(buffer_.data() + rel, window_len_);

        Scalar prob = 0.0;
        const Scalar gate_max = win_raw.segment(gate_begin_, gate_end_ - gate_begin_).maxCoeff();
        if (gate_max > gate_g_) {
            Window win;
            win.values = win_raw;
            win.start_index = next_start_;
            win.w_seconds = model_.w_seconds;
            prob = predict_proba(model_, standardize(win));
            ++model_invocations_;
        }
        out_.probs.push_back(prob);
        next_start_ += step_len_;

        // Drop samples no window will read again.
        const Index drop = next_start_ - buffer_base_;
        if (drop >= window_len_) {
            buffer_.erase(buffer_.begin(), buffer_.begin() + drop);
            buffer_base_ += drop;
        }
    }
}

WindowProbSeq StreamingScorer::finish() const {
    if (out_.probs.empty()) {
        throw TooShortError("signal shorter than one window");
    }
    return out_;
}

WindowProbSeq window_probabilities(const IntervalQuantileModel& model, const Signal& sig,
                                   Scalar gate_g, std::size_t* model_invocations) {
    StreamingScorer scorer(model, gate_g);
    scorer.push(sig.samples);
    if (model_invocations != nullptr) *model_invocations = scorer.model_invocations();
    return scorer.finish();
}

ConfidenceMap confidence_map(const WindowProbSeq& wp, Index n_samples, int fs) {
    const Index n_windows = wp.n_windows();
    const Index w = static_cast<Index>(std::llround(wp.w_seconds));
    const Index n_seconds = n_samples / fs;

    // Max over covering windows at 1 s resolution. Window k spans seconds
    // [k, k + w) on the unit step grid.
    Array per_second = Array::Zero(std::max<Index>(n_seconds, 1));
    Scalar last = 0.0;
    for (Index t = 0; t < n_seconds; ++t) {
        const Index k_lo = std::max<Index>(0, t - w + 1);
        const Index k_hi = std::min<Index>(t, n_windows - 1);
        if (k_lo <= k_hi) {
            Scalar best = wp.probs[k_lo];
            for (Index k = k_lo + 1; k <= k_hi; ++k) best = std::max(best, wp.probs[k]);
            last = best;
        }
        per_second[t] = last;
    }

    ConfidenceMap map;
    map.probs.resize(n_samples);
    for (Index i = 0; i < n_samples; ++i) {
        map.probs[i] = per_second[std::min(i / fs, std::max<Index>(n_seconds - 1, 0))];
    }
    return map;
}

std::vector<Detection> detect(const WindowProbSeq& wp, Scalar tau) {
    if (!(tau > 0.0) || tau > 1.0) {
        throw DomainError("threshold must lie in (0, 1]");
    }
    const Index step_samples = static_cast<Index>(std::llround(wp.step_seconds * wp.fs));

    std::vector<Detection> out;
    const Index n = wp.n_windows();
    Index k = 0;
    while (k < n) {
        if (wp.probs[k] < tau) {
            ++k;
            continue;
        }
        Index end = k;
        Scalar region_max = wp.probs[k];
        while (end + 1 < n && wp.probs[end + 1] >= tau) {
            ++end;
            region_max = std::max(region_max, wp.probs[end]);
        }
        for (Index j = k; j <= end; ++j) {
            if (wp.probs[j] >= region_max) {  // earliest window attaining the max
                out.push_back({j * step_samples, wp.probs[j], wp.w_seconds});
                break;
            }
        }
        k = end + 1;
    }
    return out;
}

}  // namespace falldet
