#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lilbound/phi.hpp"
#include "lilbound/profiles.hpp"

namespace lilbound {

/// Blocks [A(k), B(k)] with A(1) = 1, B(k) = A(k+1) - 1 >= A(k) + 1.
class Partition {
public:
    /// a_values = A(1..K+1). Throws DomainError when the invariants fail.
    explicit Partition(std::vector<std::int64_t> a_values);

    /// Number of blocks K.
    std::size_t depth() const noexcept { return a_.size() - 1; }
    /// 1-based block boundaries.
    std::int64_t a(std::size_t k) const;
    std::int64_t b(std::size_t k) const;
    const std::vector<std::int64_t>& a_values() const noexcept { return a_; }
    std::vector<std::int64_t> b_values() const;

private:
    std::vector<std::int64_t> a_;
};

/// A(k) = max(A(k-1) + 2, round(Q^(k-1))), A(1) = 1, for k = 1..K+1.
Partition geometric_partition(double ratio, std::size_t depth);

/**
 * The geometric family extended to arbitrary depth. Boundaries are exact
 * integers while they fit in a double mantissa and continue in log space
 * beyond, so blocks far past 2^63 can still be evaluated.
 */
class GeometricFamily {
public:
    explicit GeometricFamily(double ratio);

    double ratio() const noexcept { return ratio_; }
    /// log A(k) and log B(k); k >= 1 may be any (huge) integer-valued double.
    void log_block(double k, double& log_a, double& log_b) const;
    Partition materialize(std::size_t depth) const;

private:
    double ratio_;
    double log_ratio_;
    std::vector<std::int64_t> exact_a_;  // A(1..), exact prefix
};

/// Inputs shared by every bound evaluation.
struct BoundProblem {
    PhiFunction phi;
    SigmaProfile sigma;
    NormingSequence norming;
    /// Partition index n maps to model index n + index_offset, so that models
    /// whose first non-degenerate index is d start their first block at d.
    std::int64_t index_offset = 0;
};

/// exp(-phi*(u sigma(A) v(A) / sigma(B))) for block k (1-based) of `partition`.
double q_term(std::size_t k, const Partition& partition, const BoundProblem& problem, double u);

/// Same, from log-domain block ends.
double q_term_log(double log_a, double log_b, const BoundProblem& problem, double u);

struct QSumOptions {
    double tolerance = 1e-6;
    /// Largest number of directly summed terms.
    std::int64_t k_max = 1024;
};

struct QSumResult {
    double partial_sum = 0.0;
    /// Certified bound on the omitted tail; +inf when no certificate exists.
    double residual = kInf;
    std::int64_t k_used = 0;
    bool converged = false;
    /// Terms provably stop decaying geometrically across blocks of growing
    /// length: the series is treated as non-summable.
    bool divergent = false;

    /// partial_sum + residual, or +inf for divergent sums.
    double certified() const noexcept;
};

/**
 * Sum of q_term over the geometric family. Terms are summed directly in
 * stages up to k_max; after each stage the tail past K is bounded by
 * condensation into blocks [K + m_i, K + m_{i+1}) with m growing by 1.25,
 * each block contributing its length times its first term (terms must be
 * nonincreasing past K). Once block ratios settle below one the remainder
 * is closed with a geometric series.
 */
QSumResult q_sum(const GeometricFamily& family, const BoundProblem& problem, double u,
                 const QSumOptions& options = {});

/// 12 log-spaced ratios in [2, 16].
std::vector<double> default_ratio_grid();

struct BoundOptions {
    QSumOptions q_sum;
    /// Empty selects default_ratio_grid().
    std::vector<double> ratio_grid;
    /// Golden-section steps around the best grid ratio (0 disables).
    int refine_iterations = 3;
    unsigned workers = 1;
};

struct BoundPoint {
    double u = 0.0;
    /// min over u' <= u of raw_bound(u'); valid because W is nonincreasing in u.
    double bound = kInf;
    double raw_bound = kInf;
    double ratio = 0.0;
    std::int64_t k_used = 0;
    double partial_sum = 0.0;
    double residual = kInf;
    bool converged = false;
    bool divergent = true;
};

struct BoundReport {
    std::vector<BoundPoint> points;
    double C_used = 1.0;
    double tolerance = 0.0;
    std::vector<double> ratio_grid;
    std::string phi_label;
    std::string sigma_label;
    std::string norming_label;

    bool all_divergent() const;
    /// Some finite point did not reach the tolerance.
    bool flagged() const;
    std::vector<double> u_grid() const;
    std::vector<double> bounds() const;
};

/// inf over the geometric family of the certified Q-sum at C*u, per u.
BoundReport theorem_bound(const BoundProblem& problem, std::span<const double> u_grid, double C,
                          const BoundOptions& options = {});

struct RateFitOptions {
    double C = 1.0;
    /// Fit against phi*(u) instead of the pure power u^r.
    bool slowly_varying = false;
    BoundOptions bound;
};

struct RateFit {
    double r = 0.0;
    double C_hat = 0.0;
    double max_relative_residual = kInf;
    bool flagged = true;
    std::vector<double> u_grid;
    std::vector<double> log_bounds;
    /// Regressor per u: u^r or phi*(u).
    std::vector<double> design;
};

/// Least-squares fit of log theorem_bound(u) = -C_hat * design(u) through
/// the origin. Power-type phi requires r equal to its conjugate exponent.
RateFit rate_check(const BoundProblem& problem, double r, std::span<const double> u_grid,
                   const RateFitOptions& options = {});

/// P(S(n0) / (sigma(n0) v(n0)) > u) from a tail x -> P(S(n0)/sigma(n0) > x).
double lower_bound_single_n(const std::function<double(double)>& tail_at_n0, std::int64_t n0,
                            const NormingSequence& v, double u);

}  // namespace lilbound
