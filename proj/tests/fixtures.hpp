#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "falldet/rng.hpp"
#include "falldet/synth.hpp"
#include "falldet/types.hpp"

namespace falldet::testing {

/// Dataset engineered so one fall morphology is genuinely ambiguous.
///
/// Every recording opens with the same byte-identical "C" pattern in its first
/// 10 s: a 1.85 g bump inside second [1, 2) plus two sub-gate bumps, zero
/// noise. Nine subjects annotate that pattern as a fall at f = 1 s; eleven
/// leave it unannotated, so segmentation labels the very same standardized
/// window fall for nine subjects and adl for eleven. Identical feature vectors
/// cannot be split apart, so every tree routes them into one shared leaf with
/// fall frequency 9/20 = 0.45: the pattern's window probability is 0.45 by
/// construction. Each recording also carries one unambiguous strong fall at
/// 60 s and two supra-gate activity bursts late in the signal.
struct AmbiguousDataset {
    std::vector<Signal> signals;
    std::vector<std::size_t> fall_c_indices;  // signals whose C pattern is an annotated fall
    std::vector<std::size_t> adl_c_indices;
    double c_impact_seconds = 1.0;
    double strong_impact_seconds = 60.0;
    double w_seconds = 10.0;
};

inline void add_bump(Array& samples, int fs, double at_seconds, double duration_seconds,
                     Scalar amp_above_one) {
    const Index start = static_cast<Index>(std::llround(at_seconds * fs));
    const Index len = static_cast<Index>(std::llround(duration_seconds * fs));
    for (Index j = 0; j < len; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(len);
        const double s = std::sin(M_PI * u);
        samples[start + j] += amp_above_one * s * s;
    }
}

inline AmbiguousDataset make_ambiguous_dataset(int fs = 50, std::uint64_t seed = 2024) {
    constexpr int kFallC = 9;
    constexpr int kAdlC = 11;
    constexpr double kDuration = 120.0;

    AmbiguousDataset ds;
    for (int i = 0; i < kFallC + kAdlC; ++i) {
        const bool c_is_fall = i < kFallC;
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));

        Signal sig;
        sig.fs = fs;
        char sid[8];
        std::snprintf(sid, sizeof(sid), "%c%02d", c_is_fall ? 'C' : 'A',
                      c_is_fall ? i + 1 : i - kFallC + 1);
        sig.subject_id = sid;
        sig.samples = Array::Constant(static_cast<Index>(kDuration * fs), 1.0);

        // Background noise only after the C pattern's window, keeping the
        // pattern byte-identical across every recording.
        for (Index s = 10 * fs; s < sig.size(); ++s) sig.samples[s] += rng.normal(0.0, 0.02);

        add_bump(sig.samples, fs, 1.0, 1.0, 0.85);   // the supra-gate impact second
        add_bump(sig.samples, fs, 3.0, 1.5, 0.30);
        add_bump(sig.samples, fs, 6.0, 1.0, 0.25);

        FallProfile strong;
        strong.pre_impact_dip = 0.45;
        strong.impact_peak = 4.5;
        strong.rest_seconds = 10.0;
        strong.recovery_burst = 1.8;
        strong.recovery_seconds = 2.0;
        sig = inject_fall(std::move(sig), ds.strong_impact_seconds, strong, rng);

        add_bump(sig.samples, fs, 85.0 + rng.uniform(0.0, 0.5), 1.0, rng.uniform(0.6, 0.9));
        add_bump(sig.samples, fs, 100.0 + rng.uniform(0.0, 0.5), 1.0, rng.uniform(0.6, 0.9));

        if (c_is_fall) {
            sig.annotations.insert(sig.annotations.begin(),
                                   {static_cast<Index>(ds.c_impact_seconds * fs)});
            ds.fall_c_indices.push_back(ds.signals.size());
        } else {
            ds.adl_c_indices.push_back(ds.signals.size());
        }
        ds.signals.push_back(std::move(sig));
    }
    return ds;
}

}  // namespace falldet::testing
