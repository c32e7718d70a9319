#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lilbound/errors.hpp"
#include "lilbound/montecarlo.hpp"
#include "lilbound/rng.hpp"
#include "lilbound/stats.hpp"
#include "support.hpp"

using namespace lilbound;
using lilbound::testing::for_all;
using lilbound::testing::Gen;

namespace {

BoundProblem walk_problem() {
    return {phi2(), SigmaProfile::power_law(0.5), NormingSequence::iterated_log(2.0), 0};
}

TailEstimate manual_estimate(std::vector<double> u, std::vector<double> ci_high) {
    TailEstimate e;
    e.u_grid = std::move(u);
    e.ci_high = std::move(ci_high);
    return e;
}

}  // namespace

TEST(Wilson, Examples) {
    // Closed-form oracle evaluated independently in Python.
    const Interval mid = wilson_interval(50, 100);
    EXPECT_NEAR(mid.low, 0.37527962504483986, 1e-15);
    EXPECT_NEAR(mid.high, 0.6247203749551602, 1e-15);
    const Interval zero = wilson_interval(0, 100);
    EXPECT_EQ(zero.low, 0.0);
    EXPECT_NEAR(zero.high, 0.062220687715822974, 1e-15);
    const Interval small = wilson_interval(10, 1000);
    EXPECT_NEAR(small.low, 0.004530055521673154, 1e-15);
    EXPECT_NEAR(small.high, 0.02192928608366554, 1e-15);
    EXPECT_THROW(wilson_interval(1, 0), DomainError);
}

TEST(Wilson, AlwaysBracketsEstimate) {
    for_all(500, 31, [](Gen& g, int) {
        const auto n = static_cast<std::uint64_t>(g.integer(1, 100000));
        const auto k = static_cast<std::uint64_t>(g.integer(0, static_cast<int>(n)));
        const Interval ci = wilson_interval(k, n);
        const double p = static_cast<double>(k) / static_cast<double>(n);
        EXPECT_LE(ci.low, p);
        EXPECT_GE(ci.high, p);
        EXPECT_GE(ci.low, 0.0);
        EXPECT_LE(ci.high, 1.0);
    });
}

TEST(Stats, Quantile) {
    EXPECT_DOUBLE_EQ(quantile({4.0, 1.0, 3.0, 2.0}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile({1.0, 2.0, 3.0}, 0.25), 1.5);
    EXPECT_THROW(quantile({}, 0.5), DomainError);
}

TEST(Rng, PathStreamsAreIndependentOfOrder) {
    PathRng a(7, 3), b(7, 3), c(7, 4);
    EXPECT_EQ(a.next(), b.next());
    EXPECT_NE(a.next(), c.next());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        EXPECT_GT(u, 0.0);
        EXPECT_LE(u, 1.0);
    }
}

TEST(ExactTail, HandComputedWalk) {
    const MartingaleModel walk = MartingaleModel::chaos(1);
    const NormingSequence one = NormingSequence::constant(1.0);
    const std::vector<double> u{0.5, 1.2};
    // N = 2 paths give maxima sqrt(2), 1, 0, -1.
    const TailEstimate e = exact_sup_tail_small(walk, one, 2, u);
    EXPECT_TRUE(e.exact);
    EXPECT_EQ(e.paths, 4u);
    EXPECT_DOUBLE_EQ(e.w_hat[0], 0.5);
    EXPECT_DOUBLE_EQ(e.w_hat[1], 0.25);
    EXPECT_DOUBLE_EQ(e.ci_high[1], 0.25);
    // Two-sided maxima of |S|/sigma: sqrt(2), 1, 1, sqrt(2).
    EXPECT_DOUBLE_EQ(e.w_plus_hat[0], 1.0);
    EXPECT_DOUBLE_EQ(e.w_plus_hat[1], 0.5);
    EXPECT_THROW(exact_sup_tail_small(walk, one, 21, u), SizeError);
}

TEST(MonteCarlo, AgreesWithEnumeration) {
    const std::vector<double> u{0.5, 0.8, 1.0, 1.5};
    for (int d : {1, 2}) {
        const MartingaleModel m = MartingaleModel::chaos(d);
        const NormingSequence v = NormingSequence::iterated_log(2.0);
        const TailEstimate exact = exact_sup_tail_small(m, v, 6, u);
        const TailEstimate mc = empirical_sup_tail(m, v, 6, 100000, u, 5, {.workers = 2});
        for (std::size_t i = 0; i < u.size(); ++i) {
            EXPECT_LE(mc.ci_low[i], exact.w_hat[i]) << d << " " << u[i];
            EXPECT_GE(mc.ci_high[i], exact.w_hat[i]) << d << " " << u[i];
            EXPECT_GE(mc.w_plus_hat[i], mc.w_hat[i]);
        }
    }
}

TEST(MonteCarlo, WeightedModelAgreesWithEnumeration) {
    const MartingaleModel m = MartingaleModel::weighted_iid(1.0);
    const NormingSequence v = NormingSequence::constant(1.0);
    const std::vector<double> u{0.5, 1.0, 1.4};
    const TailEstimate exact = exact_sup_tail_small(m, v, 8, u);
    const TailEstimate mc = empirical_sup_tail(m, v, 8, 50000, u, 9, {.workers = 1});
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_LE(mc.ci_low[i], exact.w_hat[i]);
        EXPECT_GE(mc.ci_high[i], exact.w_hat[i]);
    }
}

TEST(MonteCarlo, DeterministicAcrossWorkerCounts) {
    const MartingaleModel m = MartingaleModel::chaos(2);
    const NormingSequence v = NormingSequence::iterated_log(1.0);
    const std::vector<double> u = default_u_grid();
    const TailEstimate ref = empirical_sup_tail(m, v, 512, 3000, u, 77, {.workers = 1});
    for (unsigned w : {2u, 3u, 8u}) {
        const TailEstimate e = empirical_sup_tail(m, v, 512, 3000, u, 77, {.workers = w});
        EXPECT_EQ(e.count, ref.count) << w;
        EXPECT_EQ(e.count_plus, ref.count_plus) << w;
    }
    const TailEstimate other = empirical_sup_tail(m, v, 512, 3000, u, 78, {.workers = 1});
    EXPECT_NE(other.count, ref.count);
}

TEST(MonteCarlo, Preconditions) {
    const std::vector<double> u{1.0};
    const NormingSequence v = NormingSequence::iterated_log(2.0);
    EXPECT_THROW(empirical_sup_tail(MartingaleModel::chaos(1), v, 100, 999, u, 1), SizeError);
    EXPECT_THROW(empirical_sup_tail(MartingaleModel::chaos(1), NormingSequence::table({1.0, 1.0}), 100, 1000, u, 1),
                 DomainError);
}

TEST(MonteCarlo, DefaultGrid) {
    const auto g = default_u_grid();
    ASSERT_EQ(g.size(), 16u);
    EXPECT_DOUBLE_EQ(g.front(), 1.0);
    EXPECT_NEAR(g.back(), 8.0, 1e-14);
}

TEST(Calibration, ErrorsOutsideBracket) {
    // Zero upper limits are dominated by any bound, so the bracket never closes.
    EXPECT_THROW(calibrate_C(manual_estimate({4.0}, {0.0}), walk_problem()), CalibrationError);
    // An upper limit above one fails even with the smallest C of this bracket.
    CalibrationOptions o;
    o.C_low = 5.0;
    EXPECT_THROW(calibrate_C(manual_estimate({4.0}, {2.0}), walk_problem(), o), CalibrationError);
}

TEST(Calibration, FindsDominanceBoundary) {
    const std::vector<double> u{3.0, 4.0, 5.0};
    const TailEstimate e = manual_estimate(u, {0.05, 0.01, 0.002});
    const CalibrationResult r = calibrate_C(e, walk_problem());
    EXPECT_TRUE(dominates(e, walk_problem(), r.C_hat, {}));
    EXPECT_FALSE(dominates(e, walk_problem(), r.C_hat * 1.02, {}));
    EXPECT_GE(r.margin, 1.0);
    EXPECT_EQ(r.bound_at_C_hat.size(), 3u);
}

TEST(Doob, WalkAndChaos) {
    const DoobReport walk = doob_moment_check(MartingaleModel::chaos(1), 12);
    EXPECT_DOUBLE_EQ(walk.e_final_sq, 12.0);
    EXPECT_TRUE(walk.holds);
    EXPECT_GE(walk.ratio, 1.0);
    EXPECT_LE(walk.ratio, 4.0);
    const DoobReport chaos = doob_moment_check(MartingaleModel::chaos(2), 10);
    EXPECT_DOUBLE_EQ(chaos.e_final_sq, 45.0);
    EXPECT_TRUE(chaos.holds);
    EXPECT_THROW(doob_moment_check(MartingaleModel::chaos(1), 21), SizeError);
}

TEST(Lil, TrajectoryStatsShape) {
    const LilSummary s = lil_trajectory_stats(1, 4096, 2000, 3, {64, 1024, 4096});
    EXPECT_DOUBLE_EQ(s.reference_constant, std::sqrt(2.0));
    EXPECT_LE(s.lower_quartile, s.median);
    EXPECT_LE(s.median, s.upper_quartile);
    EXPECT_GT(s.median, 0.0);
    EXPECT_LT(s.median, 3.0 * s.reference_constant);
    EXPECT_GE(s.fraction_positive, 0.5);
    EXPECT_EQ(s.checkpoint_medians.size(), 3u);
    EXPECT_DOUBLE_EQ(lil_trajectory_stats(2, 64, 1000, 3).reference_constant, 1.0);
    EXPECT_NEAR(lil_trajectory_stats(3, 64, 1000, 3).reference_constant, std::pow(2.0, 1.5) / 6.0, 1e-15);
}

TEST(Lil, HartmanWintnerProbe) {
    const HartmanWintnerSummary h = hartman_wintner_probe(4096, 2000, 4);
    EXPECT_TRUE(h.square_sum_equals_n);
    EXPECT_TRUE(h.all_positive);
    EXPECT_EQ(h.n_start, 64);
    EXPECT_GE(h.median, 0.5);
    EXPECT_LE(h.median, 4.0);
}
