#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "falldet/classifier.hpp"
#include "falldet/evaluator.hpp"
#include "falldet/rng.hpp"
#include "falldet/segmentation.hpp"
#include "falldet/signal_core.hpp"
#include "falldet/stream_detector.hpp"
#include "falldet/types.hpp"

namespace falldet::testing {

inline Window make_window(std::vector<Scalar> values, double w_seconds = 0.0, Index start = 0) {
    Window win;
    win.values = Eigen::Map<const Array>(values.data(), static_cast<Index>(values.size()));
    win.start_index = start;
    win.w_seconds = w_seconds;
    return win;
}

inline Signal make_signal(std::vector<Scalar> samples, int fs, std::string subject = "S001") {
    Signal sig;
    sig.samples = Eigen::Map<const Array>(samples.data(), static_cast<Index>(samples.size()));
    sig.fs = fs;
    sig.subject_id = std::move(subject);
    return sig;
}

// --- independent oracles (test-only, no production code paths) -------------

/// z-scores by direct two-pass arithmetic.
inline std::vector<Scalar> zscore_oracle(const std::vector<Scalar>& xs) {
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (const double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    const double sd = std::sqrt(var);
    std::vector<Scalar> out;
    out.reserve(xs.size());
    for (const double x : xs) out.push_back(sd > 0.0 ? (x - mean) / sd : 0.0);
    return out;
}

/// Sorted-vector quantile with linear interpolation, written independently.
inline Scalar quantile_oracle(std::vector<Scalar> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return values[lo];
    return values[lo] * (static_cast<double>(hi) - pos) + values[hi] * (pos - static_cast<double>(lo));
}

/// Brute-force per-second max over every covering window, then broadcast.
inline std::vector<Scalar> confidence_map_oracle(const std::vector<Scalar>& probs, Index w_seconds,
                                                 Index n_samples, int fs) {
    const Index n_seconds = n_samples / fs;
    std::vector<Scalar> per_second(static_cast<std::size_t>(std::max<Index>(n_seconds, 1)), 0.0);
    Scalar carry = 0.0;
    for (Index t = 0; t < n_seconds; ++t) {
        Scalar best = -1.0;
        for (Index k = 0; k < static_cast<Index>(probs.size()); ++k) {
            if (k <= t && t < k + w_seconds) best = std::max(best, probs[static_cast<std::size_t>(k)]);
        }
        if (best >= 0.0) carry = best;
        per_second[static_cast<std::size_t>(t)] = carry;
    }
    std::vector<Scalar> out(static_cast<std::size_t>(n_samples));
    for (Index i = 0; i < n_samples; ++i) {
        const Index t = std::min(i / fs, std::max<Index>(n_seconds - 1, 0));
        out[static_cast<std::size_t>(i)] = per_second[static_cast<std::size_t>(t)];
    }
    return out;
}

/// All-pairs brute-force matcher: overlap matrix first, then first-match
/// assignment in time order, then the grid-step TN rule.
struct MatchOracleResult {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    std::vector<double> delays;
};

inline MatchOracleResult match_oracle(std::vector<Detection> dets,
                                      std::vector<ToleranceWindow> falls, int fs,
                                      Index n_grid_steps) {
    std::sort(dets.begin(), dets.end(),
              [](const Detection& a, const Detection& b) { return a.start_index < b.start_index; });
    std::sort(falls.begin(), falls.end(), [](const ToleranceWindow& a, const ToleranceWindow& b) {
        return a.impact_seconds < b.impact_seconds;
    });

    const auto overlaps = [fs](const Detection& d, const ToleranceWindow& f) {
        const double lo = static_cast<double>(d.start_index) / fs;
        const double hi = lo + d.w_seconds;
        return std::min(hi, f.interval.hi) > std::max(lo, f.interval.lo);
    };

    std::vector<std::vector<bool>> overlap(dets.size(), std::vector<bool>(falls.size(), false));
    for (std::size_t i = 0; i < dets.size(); ++i) {
        for (std::size_t j = 0; j < falls.size(); ++j) overlap[i][j] = overlaps(dets[i], falls[j]);
    }

    MatchOracleResult res;
    std::vector<bool> taken(falls.size(), false);
    for (std::size_t i = 0; i < dets.size(); ++i) {
        bool any = false;
        for (std::size_t j = 0; j < falls.size(); ++j) any = any || overlap[i][j];
        if (!any) {
            ++res.fp;
            continue;
        }
        for (std::size_t j = 0; j < falls.size(); ++j) {
            if (overlap[i][j] && !taken[j]) {
                taken[j] = true;
                ++res.tp;
                res.delays.push_back(static_cast<double>(dets[i].start_index) / fs -
                                     falls[j].impact_seconds);
                break;
            }
        }
    }
    for (std::size_t j = 0; j < falls.size(); ++j) {
        if (!taken[j]) ++res.fn;
    }
    for (Index g = 0; g < n_grid_steps; ++g) {
        bool inside = false;
        for (const auto& f : falls) {
            inside = inside || (f.interval.lo <= static_cast<double>(g) &&
                                static_cast<double>(g) < f.interval.hi);
        }
        bool fired = false;
        for (const auto& d : dets) fired = fired || (d.start_index == g * fs);
        if (!inside && !fired) ++res.tn;
    }
    return res;
}

// --- synthetic fixtures -----------------------------------------------------

/// Separable training set built directly from crafted windows: fall windows
/// carry a > 3 g impact spike in their impact second, ADL windows a mild burst
/// elsewhere. All windows standardized.
inline TrainingSet make_separable_training_set(int n_fall, int n_adl, double w_seconds, int fs,
                                               std::uint64_t seed) {
    TrainingSet ts;
    ts.w_seconds = w_seconds;
    ts.fs = fs;
    const auto n = static_cast<Index>(w_seconds * fs);
    Rng rng(seed);

    for (int i = 0; i < n_fall + n_adl; ++i) {
        const bool fall = i < n_fall;
        std::vector<Scalar> values(static_cast<std::size_t>(n));
        for (auto& v : values) v = 1.0 + rng.normal(0.0, 0.02);
        if (fall) {
            const double peak = rng.uniform(3.0, 6.0);
            for (Index j = fs; j < std::min<Index>(2 * fs, n); ++j) {
                const double tj = static_cast<double>(j - fs) / fs;
                values[static_cast<std::size_t>(j)] += (peak - 1.0) * std::exp(-tj / 0.06);
            }
        } else {
            const double amp = rng.uniform(1.5, 2.4);
            const Index at = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n - fs)));
            for (Index j = 0; j < fs; ++j) {
                const double u = static_cast<double>(j) / fs;
                values[static_cast<std::size_t>(at + j)] +=
                    (amp - 1.0) * std::sin(M_PI * u) * std::sin(M_PI * u);
            }
        }
        Window win = make_window(std::move(values), w_seconds);
        ts.segments.push_back({standardize(win), fall ? 1 : 0, fall ? "SF" : "SA"});
    }
    return ts;
}

}  // namespace falldet::testing
