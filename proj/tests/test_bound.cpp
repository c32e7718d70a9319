#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lilbound/bound.hpp"
#include "lilbound/errors.hpp"
#include "lilbound/models.hpp"
#include "support.hpp"

using namespace lilbound;
using lilbound::testing::for_all;
using lilbound::testing::Gen;

namespace {

// Oracles from mpmath (30 digits) and an independent 200-ratio scan.
constexpr double kQTermK2U2Q3 = 0.64571402395738007433;
constexpr double kDeepSumU3Q3 = 2.1570033192235689995;
constexpr double kBoundU3 = 1.18608488070612;
constexpr double kBoundU4 = 0.365670790336646;

BoundProblem walk_problem() {
    return {phi2(), SigmaProfile::power_law(0.5), NormingSequence::iterated_log(2.0), 0};
}

// Optimal partition of [1, n_max] by dynamic programming over block ends.
double partition_dp(const BoundProblem& p, double u, int n_max) {
    std::vector<double> best(static_cast<std::size_t>(n_max) + 1, kInf);
    best[0] = 0.0;
    for (int b = 2; b <= n_max; ++b) {
        const double log_b = std::log(static_cast<double>(b));
        for (int a = 1; a < b; ++a) {
            const double cost = best[static_cast<std::size_t>(a) - 1] +
                                q_term_log(std::log(static_cast<double>(a)), log_b, p, u);
            best[static_cast<std::size_t>(b)] = std::min(best[static_cast<std::size_t>(b)], cost);
        }
    }
    return best[static_cast<std::size_t>(n_max)];
}

}  // namespace

TEST(Partition, GeometricExamples) {
    EXPECT_EQ(geometric_partition(3.0, 3).a_values(), (std::vector<std::int64_t>{1, 3, 9, 27}));
    EXPECT_EQ(geometric_partition(2.0, 2).a_values(), (std::vector<std::int64_t>{1, 3, 5}));
    EXPECT_EQ(geometric_partition(4.0, 4).a_values(), (std::vector<std::int64_t>{1, 4, 16, 64, 256}));
    EXPECT_EQ(geometric_partition(3.0, 3).b_values(), (std::vector<std::int64_t>{2, 8, 26}));
}

TEST(Partition, RejectsBadInput) {
    EXPECT_THROW(geometric_partition(1.5, 3), DomainError);
    EXPECT_THROW(Partition({2, 4}), DomainError);
    EXPECT_THROW(Partition({1, 2}), DomainError);
}

TEST(Partition, InvariantsOnRandomRatios) {
    for_all(200, 1, [](Gen& g, int) {
        const double q = g.uniform(2.0, 16.0);
        const Partition p = geometric_partition(q, static_cast<std::size_t>(g.integer(1, 12)));
        EXPECT_EQ(p.a(1), 1);
        for (std::size_t k = 1; k <= p.depth(); ++k) EXPECT_GE(p.b(k), p.a(k) + 1);
    });
}

TEST(Partition, FamilyLogBlocksMatchExactPrefix) {
    for (double q : {2.0, 2.7, 5.0, 16.0}) {
        const GeometricFamily fam(q);
        const Partition p = fam.materialize(10);
        for (std::size_t k = 1; k <= 10; ++k) {
            double la = 0.0, lb = 0.0;
            fam.log_block(static_cast<double>(k), la, lb);
            EXPECT_NEAR(la, std::log(static_cast<double>(p.a(k))), 1e-12);
            EXPECT_NEAR(lb, std::log(static_cast<double>(p.b(k))), 1e-12);
        }
    }
}

TEST(QTerm, Examples) {
    const BoundProblem p = walk_problem();
    const Partition part = geometric_partition(3.0, 4);
    EXPECT_NEAR(q_term(2, part, p, 2.0), kQTermK2U2Q3, 1e-14);
    EXPECT_NEAR(q_term(2, part, p, 1e-9), 1.0, 1e-12);
    const BoundProblem flat{phi2(), SigmaProfile::model_exact("flat", [](double) { return 0.0; }),
                            NormingSequence::constant(1.0), 0};
    EXPECT_DOUBLE_EQ(q_term(1, part, flat, 2.0), std::exp(-2.0));
    EXPECT_THROW(q_term(1, part, p, 0.0), DomainError);
}

TEST(QTerm, DegenerateSigma) {
    const MartingaleModel chaos2 = MartingaleModel::chaos(2);
    const BoundProblem p{subexponential_phi(), chaos2.sigma_profile(), NormingSequence::iterated_log(1.0), 0};
    EXPECT_THROW(q_term(1, geometric_partition(2.0, 2), p, 3.0), DegenerateSigmaError);
}

TEST(QSum, CertifiedValueDominatesDeepSum) {
    const QSumResult r = q_sum(GeometricFamily(3.0), walk_problem(), 3.0);
    EXPECT_FALSE(r.divergent);
    EXPECT_TRUE(std::isfinite(r.residual));
    EXPECT_LT(r.partial_sum, kDeepSumU3Q3);
    EXPECT_GE(r.certified(), kDeepSumU3Q3);
    EXPECT_LT(r.certified(), 1.05 * kDeepSumU3Q3);
}

TEST(QSum, ConstantNormingDiverges) {
    BoundProblem p = walk_problem();
    p.norming = NormingSequence::constant(1.0);
    const QSumResult r = q_sum(GeometricFamily(2.0), p, 3.0);
    EXPECT_TRUE(r.divergent);
    EXPECT_EQ(r.certified(), kInf);
}

TEST(TheoremBound, MatchesScanOracle) {
    const std::vector<double> u{2.0, 3.0, 4.0};
    const BoundReport rep = theorem_bound(walk_problem(), u, 1.0);
    ASSERT_EQ(rep.points.size(), 3u);
    // Every ratio >= 2 gives a non-summable series at u = 2.
    EXPECT_EQ(rep.points[0].bound, kInf);
    EXPECT_TRUE(rep.points[0].divergent);
    EXPECT_NEAR(rep.points[1].bound, kBoundU3, 0.02 * kBoundU3);
    EXPECT_NEAR(rep.points[2].bound, kBoundU4, 0.02 * kBoundU4);
    EXPECT_GE(rep.points[1].bound, rep.points[2].bound);
    EXPECT_FALSE(rep.all_divergent());
}

TEST(TheoremBound, SingleRatioEqualsQSum) {
    BoundOptions o;
    o.ratio_grid = {3.0};
    o.refine_iterations = 0;
    const std::vector<double> u{4.0};
    const BoundReport rep = theorem_bound(walk_problem(), u, 1.5, o);
    const QSumResult direct = q_sum(GeometricFamily(3.0), walk_problem(), 6.0);
    EXPECT_DOUBLE_EQ(rep.points[0].bound, direct.certified());
    EXPECT_EQ(rep.points[0].ratio, 3.0);
}

TEST(TheoremBound, RejectsRatioBelowTwo) {
    BoundOptions o;
    o.ratio_grid = {1.5, 3.0};
    const std::vector<double> u{4.0};
    EXPECT_THROW(theorem_bound(walk_problem(), u, 1.0, o), DomainError);
}

TEST(TheoremBound, AllDivergentForConstantNorming) {
    BoundProblem p = walk_problem();
    p.norming = NormingSequence::constant(1.0);
    const std::vector<double> u{3.0, 5.0};
    EXPECT_TRUE(theorem_bound(p, u, 1.0).all_divergent());
}

TEST(TheoremBound, ChaosTwoIsFiniteAndDecreasing) {
    const MartingaleModel m = MartingaleModel::chaos(2);
    const BoundProblem p{*m.phi(), m.sigma_profile(), NormingSequence::iterated_log(1.0), 1};
    const std::vector<double> u{4.0, 8.0, 16.0};
    const BoundReport rep = theorem_bound(p, u, 1.0);
    for (const auto& pt : rep.points) EXPECT_TRUE(std::isfinite(pt.bound));
    EXPECT_GT(rep.points[0].bound, rep.points[1].bound);
    EXPECT_GT(rep.points[1].bound, rep.points[2].bound);
}

TEST(Properties, BoundNonincreasingInU) {
    for_all(6, 2, [](Gen& g, int) {
        const std::vector<double> u = g.sorted_uniforms(8, 2.5, 12.0);
        const BoundReport rep = theorem_bound(walk_problem(), u, g.uniform(0.5, 2.0));
        for (std::size_t i = 1; i < u.size(); ++i) EXPECT_LE(rep.points[i].bound, rep.points[i - 1].bound);
    });
}

TEST(Properties, BoundNonincreasingInC) {
    for_all(6, 3, [](Gen& g, int) {
        const std::vector<double> u{g.uniform(3.0, 8.0)};
        const double c1 = g.uniform(0.8, 1.5);
        const double c2 = c1 * g.uniform(1.01, 2.0);
        EXPECT_LE(theorem_bound(walk_problem(), u, c2).points[0].bound,
                  theorem_bound(walk_problem(), u, c1).points[0].bound);
    });
}

TEST(Properties, SupersetRatioGridNeverWorse) {
    for_all(8, 4, [](Gen& g, int) {
        BoundOptions small, large;
        small.refine_iterations = large.refine_iterations = 0;
        small.ratio_grid = g.sorted_uniforms(3, 2.0, 16.0);
        large.ratio_grid = small.ratio_grid;
        for (double q : g.sorted_uniforms(5, 2.0, 16.0)) large.ratio_grid.push_back(q);
        const std::vector<double> u{g.uniform(3.0, 8.0)};
        EXPECT_LE(theorem_bound(walk_problem(), u, 1.0, large).points[0].bound,
                  theorem_bound(walk_problem(), u, 1.0, small).points[0].bound);
    });
}

TEST(TheoremBound, GeometricWithinFivePercentOfOptimalPartition) {
    // The unrestricted optimum beats the geometric family by more at u <= 4.
    const BoundProblem p = walk_problem();
    for (double u : {6.0, 8.0}) {
        const std::vector<double> grid{u};
        const double geo = theorem_bound(p, grid, 1.0).points[0].bound;
        const double dp = partition_dp(p, u, 3000);
        EXPECT_LE(dp, geo * (1.0 + 1e-12));
        EXPECT_LE(geo, 1.05 * dp) << u;
    }
    const std::vector<double> grid{3.0};
    EXPECT_LE(partition_dp(p, 3.0, 3000), theorem_bound(p, grid, 1.0).points[0].bound);
}

TEST(RateCheck, PowerPhiNeedsConjugateExponent) {
    const std::vector<double> u{6.0, 8.0};
    EXPECT_THROW(rate_check(walk_problem(), 1.0, u), DomainError);
}

TEST(RateCheck, ReportsDesignAndBounds) {
    const std::vector<double> u{6.0, 8.0, 10.0};
    const RateFit fit = rate_check(walk_problem(), 2.0, u);
    ASSERT_EQ(fit.design.size(), 3u);
    EXPECT_DOUBLE_EQ(fit.design[1], 64.0);
    EXPECT_GT(fit.C_hat, 0.0);
    EXPECT_TRUE(std::isfinite(fit.max_relative_residual));
}

TEST(LowerBound, TwoPointExample) {
    const auto tail = [](double x) { return x < 1.0 ? 0.5 : 0.0; };
    EXPECT_DOUBLE_EQ(lower_bound_single_n(tail, 1, NormingSequence::constant(1.0), 0.5), 0.5);
}

TEST(LowerBound, WalkMatchesEnumeration) {
    const MartingaleModel walk = MartingaleModel::chaos(1);
    const NormingSequence v = NormingSequence::iterated_log(2.0);
    const std::vector<double> finals = enumerate_final_values(walk, 10);
    for (double u : {0.5, 1.0, 1.5, 2.0}) {
        const double thr = u * std::sqrt(10.0) * v(10.0);
        double count = 0.0;
        for (double s : finals) count += s > thr ? 1.0 : 0.0;
        EXPECT_DOUBLE_EQ(lower_bound_single_n(exact_single_n_tail(walk, 10), 10, v, u), count / 1024.0) << u;
    }
}
