#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lilbound/bound.hpp"
#include "lilbound/models.hpp"
#include "lilbound/profiles.hpp"

namespace lilbound {

/// Tail counts below this are reported as censored.
inline constexpr std::uint64_t kCensorCount = 10;

/**
 * Estimates of W(u) = P(max S(n)/(sigma(n) v(n)) > u) and of the two-sided
 * W+(u) with |S(n)|, the max taken over n_min <= n <= horizon.
 */
struct TailEstimate {
    std::vector<double> u_grid;
    std::vector<std::uint64_t> count;
    std::vector<std::uint64_t> count_plus;
    std::vector<double> w_hat;
    std::vector<double> w_plus_hat;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    std::vector<double> ci_plus_low;
    std::vector<double> ci_plus_high;
    std::int64_t horizon = 0;
    std::int64_t n_min = 1;
    /// Simulated paths, or 2^horizon for exact enumeration.
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
    std::string model_id;
    std::string norming_id;
    /// Probabilities are exact rationals count / paths.
    bool exact = false;

    bool censored(std::size_t i) const { return count[i] < kCensorCount; }
    bool all_censored() const;
};

struct SimulationOptions {
    /// 0 picks LILBOUND_THREADS or the hardware concurrency.
    unsigned workers = 0;
};

TailEstimate empirical_sup_tail(const MartingaleModel& model, const NormingSequence& v, std::int64_t horizon,
                                std::uint64_t paths, std::span<const double> u_grid, std::uint64_t seed,
                                const SimulationOptions& options = {});

/// Full enumeration of the 2^horizon Rademacher paths, horizon <= 20.
TailEstimate exact_sup_tail_small(const MartingaleModel& model, const NormingSequence& v, std::int64_t horizon,
                                  std::span<const double> u_grid);

/// 16 log-spaced points in [1, 8].
std::vector<double> default_u_grid();

struct CalibrationOptions {
    double C_low = 0.01;
    double C_high = 100.0;
    /// Stop when C_high / C_low <= 1 + relative_precision.
    double relative_precision = 0.01;
    BoundOptions bound;
};

struct CalibrationResult {
    /// Largest C on the bisection bracket whose bound still dominates.
    double C_hat = 0.0;
    std::vector<double> u_grid;
    /// min over u of bound(C_hat u) / ci_high(u).
    double margin = 0.0;
    std::vector<double> bound_at_C_hat;
    std::vector<double> ci_high;
    int evaluations = 0;
};

/// Bisection in log C for the dominance boundary bound(C u) >= ci_high(u).
CalibrationResult calibrate_C(const TailEstimate& estimate, const BoundProblem& problem,
                              const CalibrationOptions& options = {});

/// Whether theorem_bound(C u) >= ci_high(u) on the whole grid.
bool dominates(const TailEstimate& estimate, const BoundProblem& problem, double C, const BoundOptions& options,
               std::vector<double>* bounds = nullptr);

struct DoobReport {
    std::int64_t horizon = 0;
    /// E max_{n <= N} S(n)^2 and E S(N)^2, exact by enumeration.
    double e_max_sq = 0.0;
    double e_final_sq = 0.0;
    double ratio = 0.0;
    /// (p / (p - 1))^2 at p = 2.
    double doob_constant = 4.0;
    bool holds = false;
};

DoobReport doob_moment_check(const MartingaleModel& model, std::int64_t horizon);

struct LilSummary {
    int degree = 1;
    std::int64_t horizon = 0;
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
    /// 2^(d/2) / d!
    double reference_constant = 0.0;
    double median = 0.0;
    double lower_quartile = 0.0;
    double upper_quartile = 0.0;
    double fraction_positive = 0.0;
    std::vector<std::int64_t> checkpoints;
    std::vector<double> checkpoint_medians;
};

/// R(N) = max_{n <= N} S(n) / (n loglog(n + 3))^(d/2) for the degree-d chaos.
LilSummary lil_trajectory_stats(int degree, std::int64_t horizon, std::uint64_t paths, std::uint64_t seed,
                                std::vector<std::int64_t> checkpoints = {}, const SimulationOptions& options = {});

struct HartmanWintnerSummary {
    std::int64_t horizon = 0;
    std::int64_t n_start = 1;
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
    /// sum eps^2 equals n at every step of every path.
    bool square_sum_equals_n = true;
    bool all_positive = true;
    double median = 0.0;
    double lower_quartile = 0.0;
    double upper_quartile = 0.0;
};

/// Per path max_{n_start <= n <= N} (sum eps)^2 / (n loglog(n + 3)).
/// n_start = 0 selects floor(sqrt(N)).
HartmanWintnerSummary hartman_wintner_probe(std::int64_t horizon, std::uint64_t paths, std::uint64_t seed,
                                            std::int64_t n_start = 0, const SimulationOptions& options = {});

}  // namespace lilbound
