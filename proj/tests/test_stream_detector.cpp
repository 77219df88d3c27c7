#include <doctest.h>

#include "falldet/errors.hpp"
#include "falldet/stream_detector.hpp"
#include "helpers.hpp"

using namespace falldet;
using namespace falldet::testing;

namespace {

/// Small trained model shared across streaming tests.
const IntervalQuantileModel& test_model() {
    static const IntervalQuantileModel model = [] {
        const TrainingSet ts = make_separable_training_set(40, 80, 3.0, 50, 23);
        return fit(ts, FeatureSpec{}, 48, 321);
    }();
    return model;
}

WindowProbSeq make_probs(std::vector<Scalar> probs, double w_seconds, int fs) {
    WindowProbSeq wp;
    wp.probs = std::move(probs);
    wp.w_seconds = w_seconds;
    wp.fs = fs;
    return wp;
}

Signal signal_with_fall(double seconds, int fs, double fall_at) {
    std::vector<Scalar> xs(static_cast<std::size_t>(seconds * fs), 1.0);
    Signal sig = make_signal(std::move(xs), fs, "T");
    const Index impact = static_cast<Index>(fall_at * fs);
    for (Index j = 0; j < fs; ++j) {
        const double tj = static_cast<double>(j) / fs;
        sig.samples[impact + j] = 1.0 + 3.5 * std::exp(-tj / 0.06);
    }
    return sig;
}

}  // namespace

TEST_CASE("constant 1 g stream is fully gated and never reaches the model") {
    Signal sig = make_signal(std::vector<Scalar>(3000, 1.0), 50, "T");
    std::size_t invocations = 999;
    const WindowProbSeq wp = window_probabilities(test_model(), sig, kDefaultGateG, &invocations);
    CHECK(invocations == 0);
    for (const Scalar p : wp.probs) CHECK(p == 0.0);
}

TEST_CASE("window counts follow the grid formula") {
    // L exactly one window long.
    Signal one = make_signal(std::vector<Scalar>(150, 1.0), 50, "T");
    CHECK(window_probabilities(test_model(), one).n_windows() == 1);

    // 120 s at 100 Hz with w=10 s: floor((12000-1000)/100)+1 = 111.
    const TrainingSet ts = make_separable_training_set(10, 20, 10.0, 100, 31);
    const IntervalQuantileModel model10 = fit(ts, FeatureSpec{}, 8, 5);
    Signal sig = make_signal(std::vector<Scalar>(12000, 1.0), 100, "T");
    CHECK(window_probabilities(model10, sig).n_windows() == 111);
}

TEST_CASE("too-short signals are rejected") {
    Signal sig = make_signal(std::vector<Scalar>(149, 1.0), 50, "T");
    CHECK_THROWS_AS(window_probabilities(test_model(), sig), TooShortError);
}

TEST_CASE("only windows whose impact second crosses the gate reach the model") {
    Signal sig = signal_with_fall(60.0, 50, 30.0);
    std::size_t invocations = 0;
    const WindowProbSeq wp = window_probabilities(test_model(), sig, kDefaultGateG, &invocations);
    // Supra-gate content lives in [30, 31); the only windows whose relative
    // second [1, 2) covers it start at 29 s, so exactly one invocation.
    CHECK(invocations == 1);
    CHECK(wp.probs[29] > 0.0);
}

TEST_CASE("confidence map of a single window is constant over its span") {
    const WindowProbSeq wp = make_probs({0.8}, 3.0, 50);
    const ConfidenceMap map = confidence_map(wp, 150, 50);
    REQUIRE(map.probs.size() == 150);
    for (Index i = 0; i < 150; ++i) CHECK(map.probs[i] == 0.8);
}

TEST_CASE("overlapping windows take the per-second maximum") {
    const WindowProbSeq wp = make_probs({0.2, 0.7}, 10.0, 100);
    const ConfidenceMap map = confidence_map(wp, 1100, 100);
    REQUIRE(map.probs.size() == 1100);
    for (Index i = 0; i < 100; ++i) CHECK(map.probs[i] == 0.2);       // only window 0 covers [0,1)
    for (Index i = 100; i < 1100; ++i) CHECK(map.probs[i] == 0.7);    // both cover, max wins
}

TEST_CASE("all-zero window probabilities give an all-zero map of signal length") {
    const WindowProbSeq wp = make_probs(std::vector<Scalar>(51, 0.0), 10.0, 100);
    const ConfidenceMap map = confidence_map(wp, 6000, 100);
    REQUIRE(map.probs.size() == 6000);
    CHECK(map.probs.maxCoeff() == 0.0);
}

TEST_CASE("confidence map equals the brute-force oracle on random sequences") {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const int fs = 100;
        const Index w = 3 + static_cast<Index>(rng.uniform_int(10));
        const Index n_windows = 1 + static_cast<Index>(rng.uniform_int(60));
        const Index n_samples = (n_windows - 1 + w) * fs + static_cast<Index>(rng.uniform_int(fs));
        std::vector<Scalar> probs(static_cast<std::size_t>(n_windows));
        for (auto& p : probs) p = rng.uniform();

        const auto map = confidence_map(make_probs(probs, static_cast<double>(w), fs), n_samples, fs);
        const auto oracle = confidence_map_oracle(probs, w, n_samples, fs);
        REQUIRE(map.probs.size() == static_cast<Index>(oracle.size()));
        for (Index i = 0; i < n_samples; ++i) {
            CHECK(map.probs[i] == oracle[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("detect applies the earliest-maximum rule per region") {
    const int fs = 100;
    SUBCASE("nothing crosses the threshold") {
        CHECK(detect(make_probs({0.1, 0.3, 0.2}, 10.0, fs), 0.5).empty());
    }
    SUBCASE("one region, earliest maximum wins") {
        const auto dets = detect(make_probs({0.6, 0.9, 0.9, 0.7}, 10.0, fs), 0.5);
        REQUIRE(dets.size() == 1);
        CHECK(dets[0].start_index == 100);
        CHECK(dets[0].prob == 0.9);
    }
    SUBCASE("two regions produce two detections") {
        const auto dets = detect(make_probs({0.8, 0.2, 0.8}, 10.0, fs), 0.5);
        REQUIRE(dets.size() == 2);
        CHECK(dets[0].start_index == 0);
        CHECK(dets[1].start_index == 200);
    }
}

TEST_CASE("detect validates the threshold domain") {
    const auto wp = make_probs({0.5}, 10.0, 100);
    CHECK_THROWS_AS(detect(wp, 0.0), DomainError);
    CHECK_THROWS_AS(detect(wp, -0.1), DomainError);
    CHECK_THROWS_AS(detect(wp, 1.5), DomainError);
    CHECK_NOTHROW(detect(wp, 1.0));
}

TEST_CASE("raising the threshold nests the detections inside the old regions") {
    // Raising tau can split one region into several, so the detection COUNT is
    // not monotone; what holds is containment: every detection at a higher
    // threshold sits on a window that was already above the lower threshold,
    // and each maximal region only shrinks.
    Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Scalar> probs(40);
        for (auto& p : probs) p = rng.uniform();
        const auto wp = make_probs(probs, 7.0, 100);
        for (double lo = 0.05; lo <= 0.85; lo += 0.2) {
            const double hi = lo + 0.1;
            std::size_t above_lo = 0;
            std::size_t above_hi = 0;
            for (const Scalar p : probs) {
                above_lo += (p >= lo) ? 1 : 0;
                above_hi += (p >= hi) ? 1 : 0;
            }
            CHECK(above_hi <= above_lo);
            for (const auto& det : detect(wp, hi)) {
                CHECK(det.prob >= hi);
                CHECK(wp.probs[static_cast<std::size_t>(det.start_index / 100)] >= lo);
            }
            CHECK(detect(wp, hi).size() <= above_hi);
        }
    }
}

TEST_CASE("chunked feeding reproduces whole-signal probabilities bit for bit") {
    Signal sig = signal_with_fall(45.0, 50, 21.0);
    const WindowProbSeq whole = window_probabilities(test_model(), sig);

    for (const Index chunk : {Index{1}, Index{50}, Index{350}, sig.size()}) {
        StreamingScorer scorer(test_model());
        Index at = 0;
        while (at < sig.size()) {
            const Index take = std::min(chunk, sig.size() - at);
            scorer.push(sig.samples.data() + at, take);
            at += take;
        }
        const WindowProbSeq chunked = scorer.finish();
        REQUIRE(chunked.probs.size() == whole.probs.size());
        for (std::size_t i = 0; i < whole.probs.size(); ++i) {
            CHECK(chunked.probs[i] == whole.probs[i]);
        }
    }
}

TEST_CASE("sub-gate signals never detect at any threshold") {
    Rng rng(47);
    std::vector<Scalar> xs(4000);
    for (auto& x : xs) x = rng.uniform(0.8, 1.39);
    Signal sig = make_signal(std::move(xs), 50, "T");
    std::size_t invocations = 0;
    const WindowProbSeq wp = window_probabilities(test_model(), sig, kDefaultGateG, &invocations);
    CHECK(invocations == 0);
    for (double tau = 0.05; tau <= 1.0; tau += 0.05) {
        CHECK(detect(wp, tau).empty());
    }
}
