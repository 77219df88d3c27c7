#include "falldet/segmentation.hpp"

#include <cmath>

#include "falldet/errors.hpp"
#include "falldet/signal_core.hpp"

namespace falldet {

namespace {

Index window_samples(double w_seconds, int fs) {
    return static_cast<Index>(std::llround(w_seconds * fs));
}

}  // namespace

Window extract_fall_segment(const Signal& sig, Index impact_index, double w_seconds) {
    if (w_seconds < 3.0) {
        throw DomainError("fall segment needs w >= 3 s (1 s falling + 1 s impact + >= 1 s post-fall)");
    }
    const Index len = window_samples(w_seconds, sig.fs);
    const Index start = impact_index - sig.fs;  // t0 = f - 1 s
    if (start < 0 || start + len > sig.size()) {
        throw BoundaryError("fall segment does not fit inside the recording");
    }
    Window win;
    win.values = sig.samples.segment(start, len);
    win.start_index = start;
    win.w_seconds = w_seconds;
    return win;
}

std::vector<Window> extract_adl_segments(const Signal& sig, double w_seconds,
                                         double step_seconds,
                                         const std::vector<IndexInterval>& exclusions,
                                         Scalar gate_g) {
    const Index len = window_samples(w_seconds, sig.fs);
    const Index step = window_samples(step_seconds, sig.fs);
    std::vector<Window> out;
    if (len <= 0 || step <= 0 || len > sig.size()) return out;

    for (Index start = 0; start + len <= sig.size(); start += step) {
        bool excluded = false;
        for (const auto& zone : exclusions) {
            if (zone.intersects(start, start + len)) {
                excluded = true;
                break;
            }
        }
        if (excluded) continue;
        if (sig.samples.segment(start, len).maxCoeff() <= gate_g) continue;

        Window win;
        win.values = sig.samples.segment(start, len);
        win.start_index = start;
        win.w_seconds = w_seconds;
        out.push_back(std::move(win));
    }
    return out;
}

IndexInterval fall_exclusion_zone(Index impact_index, int fs, double w_seconds,
                                  double guard_seconds) {
    const Index len = window_samples(w_seconds, fs);
    const Index guard = window_samples(guard_seconds, fs);
    const Index start = impact_index - fs;
    return IndexInterval{start - guard, start + len + guard};
}

TrainingSet build_training_set(const std::vector<Signal>& signals, double w_seconds,
                               Scalar gate_g, double step_seconds, double guard_seconds) {
    TrainingSet ts;
    ts.w_seconds = w_seconds;
    ts.fs = signals.empty() ? 0 : signals.front().fs;

    for (const auto& sig : signals) {
        std::vector<IndexInterval> exclusions;
        exclusions.reserve(sig.annotations.size());
        for (const auto& ann : sig.annotations) {
            exclusions.push_back(fall_exclusion_zone(ann.impact_index, sig.fs, w_seconds, guard_seconds));
        }

        for (const auto& ann : sig.annotations) {
            try {
                Window win = extract_fall_segment(sig, ann.impact_index, w_seconds);
                ts.segments.push_back({standardize(win), 1, sig.subject_id});
            } catch (const BoundaryError&) {
                ++ts.skipped_falls;
            }
        }

        for (auto& win : extract_adl_segments(sig, w_seconds, step_seconds, exclusions, gate_g)) {
            ts.segments.push_back({standardize(win), 0, sig.subject_id});
        }
    }

    if (ts.segments.empty()) {
        throw EmptyTrainingSetError("no signal yielded any training segment");
    }
    return ts;
}

}  // namespace falldet
