#include "falldet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "falldet/errors.hpp"
#include "falldet/segmentation.hpp"

namespace falldet {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Conservative upper bound on any fall's footprint past the impact, used for
/// overlap checks against falls whose profiles are no longer known.
constexpr double kMaxFallTailSeconds = 1.0 + 15.0 + 3.0;  // impact + rest + recovery

void add_burst(Array& samples, int fs, double at_seconds, double duration_seconds, Scalar amp) {
    const Index start = static_cast<Index>(std::llround(at_seconds * fs));
    const Index len = static_cast<Index>(std::llround(duration_seconds * fs));
    const Index end = std::min(start + len, samples.size());
    for (Index i = std::max<Index>(start, 0); i < end; ++i) {
        const double u = static_cast<double>(i - start) / static_cast<double>(len);
        const double env = std::sin(kPi * u);
        samples[i] += (amp - 1.0) * env * env;
    }
}

}  // namespace

FallProfile sample_fall_profile(Rng& rng) {
    FallProfile p;
    p.pre_impact_dip = rng.uniform(0.3, 0.6);
    p.impact_peak = rng.uniform(3.0, 6.0);
    p.rest_seconds = rng.uniform(3.0, 15.0);
    p.recovery_burst = rng.uniform(1.5, 2.2);
    p.recovery_seconds = rng.uniform(1.5, 3.0);
    return p;
}

std::vector<double> schedule_bursts(double duration_seconds, double rate_per_min, Rng& rng) {
    std::vector<double> times;
    if (rate_per_min <= 0.0) return times;
    const double rate_per_sec = rate_per_min / 60.0;
    double t = rng.exponential(rate_per_sec);
    while (t < duration_seconds) {
        times.push_back(t);
        t += rng.exponential(rate_per_sec);
    }
    return times;
}

Signal generate_adl_stream(const SynthConfig& cfg, Rng& rng) {
    const Index n = static_cast<Index>(std::llround(cfg.duration_seconds * cfg.fs));
    Signal sig;
    sig.fs = cfg.fs;
    sig.samples = Array::Constant(n, 1.0);

    if (cfg.noise_std > 0.0) {
        for (Index i = 0; i < n; ++i) sig.samples[i] += rng.normal(0.0, cfg.noise_std);
    }

    for (const double at : schedule_bursts(cfg.duration_seconds, cfg.adl_burst_rate_per_min, rng)) {
        const bool supra = rng.uniform() < cfg.supra_burst_fraction;
        const Scalar amp = supra ? rng.uniform(cfg.supra_burst_lo, cfg.supra_burst_hi)
                                 : rng.uniform(cfg.sub_burst_lo, cfg.sub_burst_hi);
        const double duration = rng.uniform(0.4, 1.5);
        add_burst(sig.samples, cfg.fs, at, duration, amp);
    }

    sig.samples = sig.samples.max(0.0);  // magnitudes cannot go negative
    return sig;
}

Signal inject_fall(Signal sig, double at_seconds, const FallProfile& profile, Rng& rng) {
    if (!(profile.impact_peak > kDefaultGateG)) {
        throw DomainError("impact peak must exceed the 1.4 g gate");
    }
    const int fs = sig.fs;
    const double end_seconds =
        at_seconds + 1.0 + profile.rest_seconds + profile.recovery_seconds;
    if (at_seconds - 1.0 < 0.0 || end_seconds > sig.duration_seconds()) {
        throw PlacementError("fall does not fit inside the recording");
    }
    for (const auto& ann : sig.annotations) {
        const double f = static_cast<double>(ann.impact_index) / fs;
        if (at_seconds - 1.0 < f + kMaxFallTailSeconds && f - 1.0 < end_seconds) {
            throw PlacementError("fall overlaps an existing fall");
        }
    }

    const Index impact_index = static_cast<Index>(std::llround(at_seconds * fs));
    const Scalar texture = 0.25 * 0.02;  // faint residual noise inside the fall

    // Falling phase [at-1, at): dip below 1 g.
    for (Index j = 0; j < fs; ++j) {
        const double u = static_cast<double>(j) / fs;
        const double s = std::sin(kPi * u);
        sig.samples[impact_index - fs + j] =
            1.0 - profile.pre_impact_dip * s * s + rng.normal(0.0, texture);
    }
    // Impact phase [at, at+1): a decaying oscillation (ground contact plus
    // bounces) that rings for a few tenths of a second. The phase maximum is
    // the first sample, exactly peak.
    for (Index j = 0; j < fs; ++j) {
        const double tj = static_cast<double>(j) / fs;
        const double envelope = std::exp(-tj / 0.18);
        const double ringing = 0.55 + 0.45 * std::cos(2.0 * kPi * 5.0 * tj);
        sig.samples[impact_index + j] = 1.0 + (profile.impact_peak - 1.0) * envelope * ringing +
                                        (j == 0 ? 0.0 : rng.normal(0.0, texture));
    }
    // Rest plateau: flatter than the ambient background.
    const Index rest_len = static_cast<Index>(std::llround(profile.rest_seconds * fs));
    for (Index j = 0; j < rest_len; ++j) {
        sig.samples[impact_index + fs + j] = 1.0 + rng.normal(0.0, texture);
    }
    // Recovery burst: the faller gets up.
    const Index rec_start = impact_index + fs + rest_len;
    const Index rec_len = static_cast<Index>(std::llround(profile.recovery_seconds * fs));
    for (Index j = 0; j < rec_len; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(rec_len);
        const double env = std::sin(kPi * u);
        sig.samples[rec_start + j] =
            1.0 + (profile.recovery_burst - 1.0) * env * env + rng.normal(0.0, texture);
    }

    sig.annotations.push_back({impact_index});
    std::sort(sig.annotations.begin(), sig.annotations.end(),
              [](const Annotation& a, const Annotation& b) { return a.impact_index < b.impact_index; });
    return sig;
}

std::vector<Signal> generate_dataset(const SynthConfig& cfg) {
    if (cfg.n_subjects < 1 || cfg.signals_per_subject < 1 || cfg.fs < 1 ||
        cfg.duration_seconds <= 0.0 || cfg.falls_per_signal < 0) {
        throw ConfigError("synth config fields must be positive");
    }
    const double lo = cfg.edge_margin_seconds;
    const double hi = cfg.duration_seconds - cfg.edge_margin_seconds;
    if (cfg.falls_per_signal > 0) {
        const double needed = (cfg.falls_per_signal - 1) * cfg.min_fall_spacing_seconds;
        if (hi <= lo || hi - lo < needed) {
            throw ConfigError("recording too short for the requested falls, spacing and margins");
        }
    }

    std::vector<Signal> out;
    out.reserve(static_cast<std::size_t>(cfg.n_subjects) * cfg.signals_per_subject);

    for (int s = 0; s < cfg.n_subjects; ++s) {
        char sid[16];
        std::snprintf(sid, sizeof(sid), "S%03d", s + 1);
        for (int r = 0; r < cfg.signals_per_subject; ++r) {
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(s) * 1000 + r));
            Signal sig = generate_adl_stream(cfg, rng);
            sig.subject_id = sid;

            // Rejection sampling with restarts: a partial placement can paint
            // itself into a corner, so a stuck attempt throws the set away.
            std::vector<double> placed;
            int attempts = 0;
            int stuck = 0;
            const int max_attempts = 500 * std::max(cfg.falls_per_signal, 1);
            while (static_cast<int>(placed.size()) < cfg.falls_per_signal) {
                if (++attempts > max_attempts) {
                    throw ConfigError("fall placement infeasible after bounded retries");
                }
                const double at = rng.uniform(lo, hi);
                bool ok = true;
                for (const double other : placed) {
                    if (std::abs(at - other) < cfg.min_fall_spacing_seconds) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    placed.push_back(at);
                    stuck = 0;
                } else if (++stuck > 50) {
                    placed.clear();
                    stuck = 0;
                }
            }
            std::sort(placed.begin(), placed.end());
            for (const double at : placed) {
                sig = inject_fall(std::move(sig), at, sample_fall_profile(rng), rng);
            }
            out.push_back(std::move(sig));
        }
    }
    return out;
}

}  // namespace falldet
