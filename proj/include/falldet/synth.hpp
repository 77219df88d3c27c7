#pragma once

#include <cstdint>
#include <vector>

#include "falldet/rng.hpp"
#include "falldet/types.hpp"

namespace falldet {

/// Concrete shape parameters of one injected fall. Phases run
/// falling -> impact -> rest -> recovery.
struct FallProfile {
    Scalar pre_impact_dip = 0.45;     // drop below 1 g during the falling phase
    Scalar impact_peak = 4.5;         // g, must exceed the 1.4 g gate
    double rest_seconds = 8.0;        // near-1 g plateau while the faller is down
    Scalar recovery_burst = 1.8;      // peak amplitude of the get-up burst, g
    double recovery_seconds = 2.0;
};

/// Draw a profile from the default ranges: dip U[0.3, 0.6], peak U[3, 6],
/// rest U[3, 15] s, recovery burst U[1.5, 2.2] over U[1.5, 3] s.
FallProfile sample_fall_profile(Rng& rng);

struct SynthConfig {
    int n_subjects = 10;
    int signals_per_subject = 1;
    double duration_seconds = 720.0;
    int fs = 100;
    int falls_per_signal = 5;
    double adl_burst_rate_per_min = 3.0;   // Poisson rate of activity bursts
    double supra_burst_fraction = 0.35;    // fraction of bursts exceeding the gate
    Scalar noise_std = 0.02;               // background Gaussian noise, g
    std::uint64_t seed = 42;

    double min_fall_spacing_seconds = 60.0;
    double edge_margin_seconds = 80.0;     // supports every sweep window size plus tolerance

    // Burst-amplitude ranges; the gap to the impact-peak range is the
    // difficulty knob that keeps the default task separable.
    Scalar supra_burst_lo = 1.5;
    Scalar supra_burst_hi = 2.4;
    Scalar sub_burst_lo = 1.05;
    Scalar sub_burst_hi = 1.35;
};

/// Poisson-process burst start times over [0, duration).
std::vector<double> schedule_bursts(double duration_seconds, double rate_per_min, Rng& rng);

/// Continuous background stream: 1 g baseline, Gaussian noise, and scheduled
/// activity bursts of which a configurable fraction exceeds the 1.4 g gate.
/// No annotations.
Signal generate_adl_stream(const SynthConfig& cfg, Rng& rng);

/// Overwrite the signal around `at_seconds` with a multiphase fall (1 s dip,
/// 1 s impact spike peaking at profile.impact_peak, rest plateau, recovery
/// burst) and append the impact annotation.
/// Throws PlacementError if the fall leaves the recording or crowds an
/// existing fall.
Signal inject_fall(Signal sig, double at_seconds, const FallProfile& profile, Rng& rng);

/// Full annotated dataset: subject-tagged streams with falls placed uniformly
/// at random under the spacing and edge-margin rules. Reproducible bytes from
/// the seed. Throws ConfigError when placement is infeasible.
std::vector<Signal> generate_dataset(const SynthConfig& cfg);

}  // namespace falldet
