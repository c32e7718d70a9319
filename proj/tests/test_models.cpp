#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lilbound/errors.hpp"
#include "lilbound/models.hpp"
#include "support.hpp"

using namespace lilbound;
using lilbound::testing::for_all;
using lilbound::testing::Gen;

namespace {

// Brute-force e_d over all d-subsets of the first n signs.
std::int64_t subset_sum(const std::vector<int>& eps, int d, std::size_t start = 0) {
    if (d == 0) return 1;
    std::int64_t total = 0;
    for (std::size_t i = start; i < eps.size(); ++i) total += eps[i] * subset_sum(eps, d - 1, i + 1);
    return total;
}

}  // namespace

TEST(Chaos, RecursionMatchesSubsetSums) {
    for_all(60, 11, [](Gen& g, int) {
        const int d = g.integer(1, 3);
        const int n = g.integer(0, 12);
        std::vector<int> eps;
        ChaosState state(d);
        for (int i = 0; i < n; ++i) {
            eps.push_back(g.sign());
            state.step(eps.back());
            EXPECT_EQ(static_cast<std::int64_t>(state.value()), subset_sum(eps, d));
        }
    });
}

TEST(Chaos, VarianceByEnumeration) {
    for (int d = 1; d <= 3; ++d) {
        const MartingaleModel m = MartingaleModel::chaos(d);
        for (int n : {3, 6, 10}) {
            double sq = 0.0;
            for (double s : enumerate_final_values(m, n)) sq += s * s;
            EXPECT_DOUBLE_EQ(sq / std::ldexp(1.0, n), m.variance(n)) << d << " " << n;
            EXPECT_NEAR(std::exp(m.sigma_profile().log_at_log(std::log(n))), m.sigma(n), 1e-12 * m.sigma(n));
        }
    }
}

TEST(Chaos, MartingaleProperty) {
    // E[S(n+1) | first n signs] = S(n): pair paths differing in the last sign.
    for (int d = 1; d <= 3; ++d) {
        const MartingaleModel m = MartingaleModel::chaos(d);
        const int n = 8;
        const std::vector<double> prev = enumerate_final_values(m, n);
        const std::vector<double> next = enumerate_final_values(m, n + 1);
        for (std::size_t mask = 0; mask < prev.size(); ++mask)
            EXPECT_DOUBLE_EQ(0.5 * (next[mask] + next[mask | (std::size_t{1} << n)]), prev[mask]);
    }
}

TEST(Chaos, DegreeTwoIdentity) {
    for_all(50, 12, [](Gen& g, int) {
        std::vector<std::int64_t> path(static_cast<std::size_t>(g.integer(1, 200)));
        for (auto& e : path) e = g.sign();
        EXPECT_TRUE(chaos_identity_check(path, path.size()));
    });
    const std::vector<std::int64_t> bad{1, 1};
    EXPECT_THROW(chaos_identity_check(bad, 3), DomainError);
}

TEST(Chaos, WidensToInt128OnOverflow) {
    // All-plus path: e_3(n) = C(n, 3) passes 2^63 near n = 3.8e6; use large noise instead.
    ChaosState state(3);
    const std::int64_t big = std::int64_t{1} << 40;
    for (int i = 0; i < 4; ++i) state.step(big);
    EXPECT_TRUE(state.widened());
    const int128 expect = static_cast<int128>(4) * big * big * big;
    EXPECT_TRUE(state.value() == expect);
    EXPECT_TRUE(state.e(1) == static_cast<int128>(4) * big);
}

TEST(Chaos, Binomial128) {
    EXPECT_TRUE(binomial128(10, 3) == 120);
    EXPECT_TRUE(binomial128(100, 50) > static_cast<int128>(std::numeric_limits<std::int64_t>::max()));
    EXPECT_TRUE(binomial128(5, 7) == 0);
    EXPECT_THROW(binomial128(1000, 500), DomainError);
}

TEST(Chaos, PhiAssignment) {
    EXPECT_EQ(MartingaleModel::chaos(1).phi()->label(), "phi2");
    EXPECT_EQ(MartingaleModel::chaos(2).phi()->label(), subexponential_phi().label());
    EXPECT_FALSE(MartingaleModel::chaos(3).phi().has_value());
    EXPECT_EQ(MartingaleModel::chaos(2).first_index(), 2);
    EXPECT_THROW(MartingaleModel::chaos(0), DomainError);
}

TEST(Weighted, Examples) {
    const MartingaleModel m = MartingaleModel::weighted_iid(1.0);
    EXPECT_DOUBLE_EQ(m.variance(1), 0.25);
    EXPECT_NEAR(m.variance(60), 1.0 / 3.0, 1e-15);
    const std::vector<double> s2 = enumerate_final_values(m, 2);
    // Bit 0 is eps(1): masks 0..3 are (-,-), (+,-), (-,+), (+,+).
    EXPECT_EQ(s2, (std::vector<double>{-0.75, 0.25, -0.25, 0.75}));
    EXPECT_DOUBLE_EQ(MartingaleModel::weighted_iid(2.0).variance(1), 1.0);
    EXPECT_THROW(MartingaleModel::weighted_iid(0.0), DomainError);
}

TEST(Weighted, VarianceByEnumeration) {
    const MartingaleModel m = MartingaleModel::weighted_iid(1.5);
    double sq = 0.0;
    for (double s : enumerate_final_values(m, 12)) sq += s * s;
    EXPECT_NEAR(sq / 4096.0, m.variance(12), 1e-15);
}

TEST(Weighted, WeibullNoiseHasUnitVariance) {
    Gen g(13);
    for (double r : {1.0, 2.0, 3.0}) {
        double sq = 0.0;
        const int m = 200000;
        for (int i = 0; i < m; ++i) {
            const double x = weibull_unit_noise(r, g.uniform(1e-300, 1.0), g.sign() > 0);
            sq += x * x;
        }
        EXPECT_NEAR(sq / m, 1.0, 0.03) << r;
    }
    EXPECT_EQ(MartingaleModel::weighted_iid(1.0, NoiseKind::weibull, 3.0).phi()->label(),
              power_phi(1.5).label());
    EXPECT_FALSE(MartingaleModel::weighted_iid(1.0, NoiseKind::weibull, 1.0).phi().has_value());
}

TEST(PowerLaw, Examples) {
    EXPECT_DOUBLE_EQ(power_law_surrogate(0.5)(4.0), 2.0);
    EXPECT_NEAR(power_law_surrogate(1.0, SigmaProfile::SlowFactor::log)(2.0), 2.0 * std::log(2.0 + std::exp(1.0)),
                1e-14);
    EXPECT_NEAR(power_law_surrogate(1.0, SigmaProfile::SlowFactor::inverse_log)(2.0),
                2.0 / std::log(2.0 + std::exp(1.0)), 1e-14);
    // Far beyond double range in n, still finite in log space.
    EXPECT_NEAR(power_law_surrogate(0.5).log_at_log(1000.0), 500.0, 1e-12);
}

TEST(ExactTail, WalkBinomialMatchesEnumeration) {
    const MartingaleModel walk = MartingaleModel::chaos(1);
    const std::vector<double> finals = enumerate_final_values(walk, 14);
    const auto tail = exact_single_n_tail(walk, 14);
    for (double x : {-1.0, 0.0, 0.3, 1.0, 2.5, 4.0}) {
        double c = 0.0;
        for (double s : finals) c += s > x * std::sqrt(14.0) ? 1.0 : 0.0;
        EXPECT_DOUBLE_EQ(tail(x), c / 16384.0) << x;
    }
    EXPECT_THROW(exact_single_n_tail(MartingaleModel::chaos(2), 1), DegenerateSigmaError);
}
