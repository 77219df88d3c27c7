#include <doctest.h>

#include "falldet/errors.hpp"
#include "falldet/evaluator.hpp"
#include "helpers.hpp"

using namespace falldet;
using namespace falldet::testing;

namespace {

Detection det_at(double start_seconds, double w_seconds, int fs, Scalar prob = 0.9) {
    return Detection{static_cast<Index>(start_seconds * fs), prob, w_seconds};
}

}  // namespace

TEST_CASE("tolerance window geometry") {
    SUBCASE("w=7, t=20 accepts detections up to 27 s early and 20 s late") {
        const ToleranceWindow tw = tolerance_window(100.0, 7.0, 20.0);
        CHECK(tw.interval.lo == doctest::Approx(73.0));
        CHECK(tw.interval.hi == doctest::Approx(120.0));
    }
    SUBCASE("w=10, t=20, f=600") {
        const ToleranceWindow tw = tolerance_window(600.0, 10.0, 20.0);
        CHECK(tw.interval.lo == doctest::Approx(570.0));
        CHECK(tw.interval.hi == doctest::Approx(620.0));
    }
    SUBCASE("zero tolerance") {
        const ToleranceWindow tw = tolerance_window(600.0, 10.0, 0.0);
        CHECK(tw.interval.lo == doctest::Approx(590.0));
        CHECK(tw.interval.hi == doctest::Approx(600.0));
    }
    SUBCASE("clipped to the recording") {
        const ToleranceWindow tw = tolerance_window(10.0, 10.0, 20.0, 25.0);
        CHECK(tw.interval.lo == 0.0);
        CHECK(tw.interval.hi == 25.0);
    }
}

TEST_CASE("iou basics") {
    CHECK(iou({2.0, 9.0}, {2.0, 9.0}) == doctest::Approx(1.0));
    CHECK(iou({0.0, 5.0}, {7.0, 9.0}) == 0.0);
    CHECK(iou({0.0, 10.0}, {5.0, 15.0}) == doctest::Approx(5.0 / 15.0).epsilon(1e-12));
    CHECK_THROWS_AS(iou({3.0, 3.0}, {0.0, 1.0}), DomainError);
}

TEST_CASE("matching the three canonical layouts") {
    const int fs = 100;
    const std::vector<ToleranceWindow> falls = {tolerance_window(600.0, 10.0, 20.0)};

    SUBCASE("one detection inside the window") {
        const auto res = match({det_at(599.0, 10.0, fs)}, falls, fs, 700);
        CHECK(res.counts.tp == 1);
        CHECK(res.counts.fp == 0);
        CHECK(res.counts.fn == 0);
        REQUIRE(res.delays.size() == 1);
        CHECK(res.delays[0] == doctest::Approx(-1.0));
    }
    SUBCASE("no detections at all") {
        const auto res = match({}, falls, fs, 700);
        CHECK(res.counts.tp == 0);
        CHECK(res.counts.fp == 0);
        CHECK(res.counts.fn == 1);
    }
    SUBCASE("two in-window detections and one stray") {
        const auto res = match(
            {det_at(595.0, 10.0, fs), det_at(608.0, 10.0, fs), det_at(100.0, 10.0, fs)}, falls,
            fs, 700);
        CHECK(res.counts.tp == 1);  // the second in-window hit is discarded, not an FP
        CHECK(res.counts.fp == 1);
        CHECK(res.counts.fn == 0);
        REQUIRE(res.delays.size() == 1);
        CHECK(res.delays[0] == doctest::Approx(-5.0));  // first match sets the delay
    }
}

TEST_CASE("true negatives count quiet grid steps outside every tolerance window") {
    const int fs = 100;
    const std::vector<ToleranceWindow> falls = {tolerance_window(50.0, 10.0, 20.0, 120.0)};
    // Window spans [20, 70): grid steps 0..119, 70 of them inside, one stray
    // detection at second 90 outside.
    const auto res = match({det_at(90.0, 10.0, fs)}, falls, fs, 120);
    CHECK(res.counts.fp == 1);
    CHECK(res.counts.tn == 120 - 50 - 1);
}

TEST_CASE("match equals the all-pairs brute-force oracle on random layouts") {
    Rng rng(55);
    const int fs = 100;
    for (int trial = 0; trial < 200; ++trial) {
        const double w = 3.0 + static_cast<double>(rng.uniform_int(12));
        const double duration = 300.0 + rng.uniform(0.0, 300.0);

        std::vector<ToleranceWindow> falls;
        const int n_falls = static_cast<int>(rng.uniform_int(4));
        for (int i = 0; i < n_falls; ++i) {
            falls.push_back(tolerance_window(rng.uniform(0.0, duration), w, 20.0, duration));
        }
        std::vector<Detection> dets;
        const int n_dets = static_cast<int>(rng.uniform_int(6));
        for (int i = 0; i < n_dets; ++i) {
            dets.push_back(det_at(static_cast<double>(rng.uniform_int(
                                      static_cast<std::uint64_t>(duration - w))),
                                  w, fs, rng.uniform()));
        }
        const Index n_grid = static_cast<Index>(duration - w) + 1;

        const auto got = match(dets, falls, fs, n_grid);
        const auto want = match_oracle(dets, falls, fs, n_grid);
        CHECK(got.counts.tp == want.tp);
        CHECK(got.counts.fp == want.fp);
        CHECK(got.counts.fn == want.fn);
        CHECK(got.counts.tn == want.tn);
        CHECK(got.counts.tp + got.counts.fn == n_falls);
        CHECK(got.counts.tp + got.counts.fp <= n_dets);
        REQUIRE(got.delays.size() == want.delays.size());
        for (std::size_t i = 0; i < got.delays.size(); ++i) {
            CHECK(got.delays[i] == doctest::Approx(want.delays[i]));
        }
    }
}

TEST_CASE("pipeline-style detections keep delays inside the tolerance construction") {
    // A detection that starts inside the tolerance window has delay in
    // [-(w+t), t); the streaming pipeline's detections land near the impact,
    // so the bound is checked here on in-window starts.
    const int fs = 100;
    const double w = 10.0;
    const double t = 20.0;
    const ToleranceWindow fall = tolerance_window(600.0, w, t);
    Rng rng(59);
    for (int i = 0; i < 200; ++i) {
        const double start = rng.uniform(fall.interval.lo, fall.interval.hi);
        const auto res = match({det_at(start, w, fs)}, {fall}, fs, 0);
        REQUIRE(res.delays.size() == 1);
        CHECK(res.delays[0] >= -(w + t) - 0.01);  // index rounding slack
        CHECK(res.delays[0] < t);
    }
}

TEST_CASE("metric ratios from counts") {
    SUBCASE("near-balanced example") {
        const MetricRatios r = metrics({19, 2, 2, 1000});
        CHECK(r.precision == doctest::Approx(19.0 / 21.0));
        CHECK(r.recall == doctest::Approx(19.0 / 21.0));
        CHECK(r.specificity == doctest::Approx(1000.0 / 1002.0));
        CHECK(r.f1 == doctest::Approx(19.0 / 21.0));
        CHECK(r.balanced_accuracy == doctest::Approx(0.5 * (19.0 / 21.0 + 1000.0 / 1002.0)));
        CHECK_FALSE(r.degenerate);
    }
    SUBCASE("all-zero counts are degenerate, not an error") {
        const MetricRatios r = metrics({0, 0, 0, 0});
        CHECK(r.precision == 0.0);
        CHECK(r.recall == 0.0);
        CHECK(r.specificity == 0.0);
        CHECK(r.f1 == 0.0);
        CHECK(r.balanced_accuracy == 0.0);
        CHECK(r.degenerate);
    }
}

TEST_CASE("f1 lies between precision and recall when both are defined") {
    Rng rng(57);
    for (int trial = 0; trial < 200; ++trial) {
        const ConfusionCounts c{static_cast<std::int64_t>(rng.uniform_int(20)) + 1,
                                static_cast<std::int64_t>(rng.uniform_int(20)),
                                static_cast<std::int64_t>(rng.uniform_int(20)),
                                static_cast<std::int64_t>(rng.uniform_int(500))};
        const MetricRatios r = metrics(c);
        CHECK(r.f1 >= std::min(r.precision, r.recall) - 1e-12);
        CHECK(r.f1 <= std::max(r.precision, r.recall) + 1e-12);
    }
}

TEST_CASE("detection delay is window start minus impact") {
    const int fs = 100;
    const ToleranceWindow fall = tolerance_window(600.0, 10.0, 20.0);
    CHECK(detection_delay(det_at(599.0, 10.0, fs), fall, fs) == doctest::Approx(-1.0));
    CHECK(detection_delay(det_at(603.0, 10.0, fs), fall, fs) == doctest::Approx(3.0));
    CHECK_THROWS_AS(detection_delay(det_at(100.0, 10.0, fs), fall, fs), ContractError);
}
