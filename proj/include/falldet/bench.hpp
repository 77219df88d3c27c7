#pragma once

#include <cstddef>

#include "falldet/classifier.hpp"
#include "falldet/types.hpp"

namespace falldet {

/// Per-window inference timing over a continuous signal. Every grid window is
/// timed end to end: gate check, standardization, feature extraction and the
/// ensemble vote, mirroring exactly what the streaming path executes.
struct BenchReport {
    std::size_t n_windows = 0;
    std::size_t n_gated = 0;    // windows rejected by the 1.4 g gate
    std::size_t n_scored = 0;   // windows that reached the model
    double mean_ms = 0.0;       // over all windows, gated ones included
    double median_ms = 0.0;
    double p95_ms = 0.0;
    double max_ms = 0.0;
    double scored_mean_ms = 0.0;  // over the windows that reached the model
    double scored_p95_ms = 0.0;
    double windows_per_second = 0.0;
};

BenchReport run_bench(const IntervalQuantileModel& model, const Signal& sig,
                      Scalar gate_g = kDefaultGateG, int warmup_windows = 16);

}  // namespace falldet
