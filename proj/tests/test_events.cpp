#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwta/rwta.hpp"

using namespace rwta;

namespace {

std::vector<double> grid(std::size_t n, double dt, double t0 = 0.0) {
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = t0 + k * dt;
    return t;
}

// Sample-by-sample reference detector.
std::vector<double> brute_force(const std::vector<double>& t, const std::vector<double>& v, double thr) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        if (v[k] < thr && v[k + 1] >= thr) {
            out.push_back(t[k] + (thr - v[k]) / (v[k + 1] - v[k]) * (t[k + 1] - t[k]));
        }
    }
    return out;
}

EventTrain periodic(double first, double period, std::size_t n, std::string name = {}) {
    EventTrain e{std::move(name), {}};
    for (std::size_t k = 0; k < n; ++k) e.times.push_back(first + k * period);
    return e;
}

}  // namespace

TEST(DetectEvents, ConstantBelowThresholdIsEmpty) {
    const auto t = grid(100, 0.1);
    const std::vector<double> v(100, -70.0);
    EXPECT_TRUE(detect_events(t, v, -40.0).empty());
}

TEST(DetectEvents, SingleSpikeAndInterpolation) {
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0};
    const std::vector<double> v{-65.0, -50.0, -30.0, 20.0, -70.0};
    const auto e = detect_events(t, v, -40.0, "n1");
    ASSERT_EQ(e.size(), 1u);
    EXPECT_DOUBLE_EQ(e.times[0], 1.5);
    EXPECT_EQ(e.channel, "n1");
}

TEST(DetectEvents, StartingAboveThresholdIsNotAnEvent) {
    const std::vector<double> t{0.0, 1.0, 2.0};
    const std::vector<double> v{0.0, 10.0, -60.0};
    EXPECT_TRUE(detect_events(t, v, -40.0).empty());
}

TEST(DetectEvents, LandingExactlyOnThresholdCounts) {
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> v{-50.0, -40.0, -40.0, -50.0};
    const auto e = detect_events(t, v, -40.0);
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e.times[0], 1.0);
}

TEST(DetectEvents, MatchesBruteForceOnRandomPiecewiseLinear) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> step(0.0, 8.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto t = grid(2000, 0.05, trial);
        std::vector<double> v(t.size());
        double x = -40.0;
        for (auto& s : v) s = (x += step(rng));
        const auto e = detect_events(t, v, -40.0);
        EXPECT_EQ(e.times, brute_force(t, v, -40.0));
    }
}

TEST(DetectEvents, ShiftEquivariance) {
    const auto t = grid(5000, 0.01);
    std::vector<double> v(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) v[k] = 60.0 * std::sin(0.37 * t[k]) - 30.0;
    const auto base = detect_events(t, v, -40.0);
    const double shift = 12.5;
    std::vector<double> ts = t;
    for (auto& x : ts) x += shift;
    const auto moved = detect_events(ts, v, -40.0);
    ASSERT_EQ(base.size(), moved.size());
    for (std::size_t k = 0; k < base.size(); ++k) EXPECT_NEAR(moved.times[k] - base.times[k], shift, 1e-9);
}

TEST(DetectEvents, ThresholdMonotonicity) {
    // Spikes of varying height from a fixed -70 baseline.
    const auto t = grid(3000, 0.1);
    std::vector<double> v(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double bump = std::pow(std::max(0.0, std::sin(0.2 * t[k])), 4);
        v[k] = -70.0 + (80.0 + 50.0 * std::sin(0.01 * t[k])) * bump;
    }
    std::size_t prev = detect_events(t, v, -60.0).size();
    for (double thr = -55.0; thr <= 60.0; thr += 5.0) {
        const std::size_t c = detect_events(t, v, thr).size();
        EXPECT_LE(c, prev) << thr;
        prev = c;
    }
}

TEST(DetectEvents, LengthMismatchThrows) {
    EXPECT_THROW(detect_events(grid(3, 1.0), std::vector<double>(2, 0.0), 0.0), std::invalid_argument);
}

TEST(WinnerSequence, MergesInTimeOrderAndCollapsesBursts) {
    const std::vector<EventTrain> trains{{"n1", {1.0, 2.0, 20.0}}, {"n2", {10.0, 30.0}}};
    const auto seq = winner_sequence(trains, 5.0);
    const auto ids = winner_ids(seq);
    EXPECT_EQ(ids, (std::vector<std::size_t>{0, 1, 0, 1}));
    EXPECT_EQ(seq[0].time, 1.0);
}

TEST(WinnerSequence, SingleNeuron) {
    const std::vector<EventTrain> trains{periodic(0.0, 10.0, 6)};
    const auto ids = winner_ids(winner_sequence(trains));
    EXPECT_EQ(ids, std::vector<std::size_t>(6, 0));
}

TEST(WinnerSequence, RingPatternIsCyclic) {
    std::vector<EventTrain> trains;
    for (std::size_t i = 0; i < 5; ++i) trains.push_back(periodic(i * 10.0, 50.0, 8));
    const auto ids = winner_ids(winner_sequence(trains));
    EXPECT_TRUE(is_cyclic_permutation(ids, 5));
    EXPECT_EQ(phase_jumps(ids, 5), 0u);
    EXPECT_EQ(immediate_repeats(ids), 0u);
}

TEST(SequenceMetrics, JumpsRepeatsAndPermutations) {
    const std::vector<std::size_t> ids{0, 1, 2, 4, 0, 1, 1, 2};
    EXPECT_EQ(phase_jumps(ids, 5), 2u);
    EXPECT_EQ(immediate_repeats(ids), 1u);
    EXPECT_FALSE(is_cyclic_permutation(ids, 5));
    const std::vector<std::size_t> perm{2, 0, 1, 2, 0, 1, 2};
    EXPECT_TRUE(is_cyclic_permutation(perm, 3));
    EXPECT_FALSE(is_cyclic_permutation(perm, 4));
}

TEST(EstimatePeriod, PeriodicTrain) {
    const auto p = estimate_period(periodic(3.0, 7.5, 20));
    EXPECT_NEAR(p.mean, 7.5, 1e-12);
    EXPECT_NEAR(p.std, 0.0, 1e-12);
    EXPECT_EQ(p.intervals, 19u);
    EXPECT_NEAR(p.frequency(), 1.0 / 7.5, 1e-12);
}

TEST(EstimatePeriod, MixedIntervals) {
    const std::vector<double> t{0.0, 4.0, 12.0};
    const auto p = estimate_period(t);
    EXPECT_DOUBLE_EQ(p.mean, 6.0);
    EXPECT_DOUBLE_EQ(p.std, 2.0);
}

TEST(EstimatePeriod, DiscardAndInsufficient) {
    std::vector<double> t{0.0, 100.0, 101.0, 111.0, 121.0, 131.0};
    EXPECT_NEAR(estimate_period(t, 2).mean, 10.0, 1e-12);
    EXPECT_THROW(estimate_period(t, 4), InsufficientEvents);
    EXPECT_THROW(estimate_period(std::vector<double>{1.0, 2.0}), InsufficientEvents);
}

TEST(PhaseDifference, IdenticalAndShifted) {
    const auto ref = periodic(0.0, 20.0, 50);
    for (double o : phase_difference(ref, ref)) EXPECT_NEAR(o, 0.0, 1e-12);
    const auto shifted = periodic(5.0, 20.0, 50);
    const auto off = phase_difference(ref, shifted);
    ASSERT_FALSE(off.empty());
    for (double o : off) EXPECT_NEAR(o, 0.25, 1e-12);
}

TEST(PhaseDifference, SlowObserverDriftsAndUnwrapsLinearly) {
    const auto ref = periodic(0.0, 10.0, 200);
    const auto obs = periodic(0.0, 10.1, 198);
    const auto un = unwrap_phase(phase_difference(ref, obs));
    ASSERT_GT(un.size(), 150u);
    // Observer lags by 0.01 cycle per reference cycle.
    EXPECT_NEAR(un[150] - un[50], 100 * 0.01, 0.02);
}

TEST(PhaseDifference, NoOverlapThrows) {
    EXPECT_THROW(phase_difference(periodic(0.0, 1.0, 5), periodic(1000.0, 1.0, 5)), InsufficientEvents);
    EXPECT_THROW(phase_difference(periodic(0.0, 1.0, 1), periodic(0.0, 1.0, 5)), InsufficientEvents);
}

TEST(WrapHalf, Range) {
    EXPECT_EQ(wrap_half(0.5), -0.5);
    EXPECT_EQ(wrap_half(-0.5), -0.5);
    EXPECT_NEAR(wrap_half(1.25), 0.25, 1e-15);
    EXPECT_NEAR(wrap_half(-0.75), 0.25, 1e-15);
}

TEST(ActiveIntervals, OverlapMeasure) {
    const auto t = grid(11, 1.0);
    const std::vector<double> a{-50, -30, -30, -30, -50, -50, -50, -50, -50, -50, -50};
    const std::vector<double> b{-50, -50, -50, -30, -30, -50, -50, -50, -50, -50, -50};
    const auto ia = active_intervals(t, a, -40.0);
    const auto ib = active_intervals(t, b, -40.0);
    ASSERT_EQ(ia.size(), 1u);
    EXPECT_DOUBLE_EQ(ia[0].begin, 0.5);
    EXPECT_DOUBLE_EQ(ia[0].end, 3.5);
    const std::vector<std::vector<Interval>> both{ia, ib};
    EXPECT_DOUBLE_EQ(max_pairwise_overlap(both), 1.0);
    const std::vector<std::vector<Interval>> self{ia};
    EXPECT_EQ(max_pairwise_overlap(self), 0.0);
}
