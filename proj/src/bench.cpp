#include "falldet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include "falldet/errors.hpp"
#include "falldet/signal_core.hpp"
#include "falldet/stream_detector.hpp"

namespace falldet {

namespace {

double percentile_ms(std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted[lo];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BenchReport run_bench(const IntervalQuantileModel& model, const Signal& sig,
                      Scalar gate_g, int warmup_windows) {
    using clock = std::chrono::steady_clock;

    const Index wlen = model.window_samples();
    const Index step = model.fs;
    if (sig.size() < wlen) throw TooShortError("signal shorter than one window");

    const Index gate_begin = std::min<Index>(model.fs, wlen);
    const Index gate_end = std::min<Index>(2 * static_cast<Index>(model.fs), wlen);

    auto score_window = [&](Index start, bool& invoked) {
        const Eigen::Map<const Array> raw(sig.samples.data() + start, wlen);
        Scalar prob = 0.0;
        invoked = false;
        if (raw.segment(gate_begin, gate_end - gate_begin).maxCoeff() > gate_g) {
            Window win;
            win.values = raw;
            win.start_index = start;
            win.w_seconds = model.w_seconds;
            prob = predict_proba(model, standardize(win));
            invoked = true;
        }
        return prob;
    };

    // Warm caches and branch predictors before timing.
    volatile Scalar sink = 0.0;
    for (int i = 0; i < warmup_windows; ++i) {
        const Index start = (static_cast<Index>(i) * step) % (sig.size() - wlen + 1);
        bool invoked = false;
        sink = sink + score_window(start, invoked);
    }

    BenchReport report;
    std::vector<double> times_ms;
    std::vector<double> scored_ms;
    const auto run_start = clock::now();
    for (Index start = 0; start + wlen <= sig.size(); start += step) {
        bool invoked = false;
        const auto t0 = clock::now();
        sink = sink + score_window(start, invoked);
        const auto t1 = clock::now();
        times_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        ++report.n_windows;
        if (invoked) {
            ++report.n_scored;
            scored_ms.push_back(times_ms.back());
        } else {
            ++report.n_gated;
        }
    }
    const double total_s = std::chrono::duration<double>(clock::now() - run_start).count();

    double sum = 0.0;
    for (const double t : times_ms) sum += t;
    report.mean_ms = sum / static_cast<double>(times_ms.size());
    std::sort(times_ms.begin(), times_ms.end());
    report.median_ms = percentile_ms(times_ms, 0.5);
    report.p95_ms = percentile_ms(times_ms, 0.95);
    report.max_ms = times_ms.back();
    if (!scored_ms.empty()) {
        double ssum = 0.0;
        for (const double t : scored_ms) ssum += t;
        report.scored_mean_ms = ssum / static_cast<double>(scored_ms.size());
        std::sort(scored_ms.begin(), scored_ms.end());
        report.scored_p95_ms = percentile_ms(scored_ms, 0.95);
    }
    report.windows_per_second = static_cast<double>(report.n_windows) / total_s;
    return report;
}

}  // namespace falldet
