#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lilbound/phi.hpp"
#include "lilbound/profiles.hpp"

namespace lilbound {

__extension__ using int128 = __int128;

/// Binomial coefficient C(n, k) in 128-bit arithmetic; throws on overflow.
int128 binomial128(std::int64_t n, std::int64_t k);
double binomial_double(std::int64_t n, std::int64_t k);

/**
 * Elementary symmetric polynomials e[0..d] of the integer noise seen so far,
 * updated by e[j] += eps * e[j-1] from high j to low. Storage starts as
 * int64 and switches to 128-bit on the first overflow.
 */
class ChaosState {
public:
    explicit ChaosState(int degree);

    void step(std::int64_t eps);

    int degree() const noexcept { return degree_; }
    std::int64_t n() const noexcept { return n_; }
    bool widened() const noexcept { return wide_; }
    int128 e(int j) const;
    /// e[d], the chaos value S(n).
    int128 value() const { return e(degree_); }

private:
    int degree_;
    std::int64_t n_ = 0;
    bool wide_ = false;
    std::vector<std::int64_t> narrow_;
    std::vector<int128> wide_values_;
};

enum class NoiseKind { rademacher, weibull };

/// Generic walker state for any built-in model.
struct ModelState {
    std::int64_t n = 0;
    double s = 0.0;
    std::optional<ChaosState> chaos;
};

/**
 * Immutable descriptor of a built-in martingale. Unit noise is +-1
 * (Rademacher) or a symmetric Weibull variable scaled to unit variance with
 * tail exp(-c x^r); models rescale it as needed.
 */
class MartingaleModel {
public:
    enum class Kind { chaos, weighted_iid };

    /// Degree-d Rademacher chaos.
    static MartingaleModel chaos(int d);
    /// S(n) = sum_{k<=n} 2^-k xi(k), xi = beta * unit noise.
    static MartingaleModel weighted_iid(double beta, NoiseKind noise = NoiseKind::rademacher,
                                        double weibull_r = 2.0);

    Kind kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }
    int degree() const noexcept { return degree_; }
    double beta() const noexcept { return beta_; }
    NoiseKind noise_kind() const noexcept { return noise_; }
    double weibull_r() const noexcept { return weibull_r_; }
    bool rademacher() const noexcept { return noise_ == NoiseKind::rademacher; }

    /// First n with sigma(n) > 0.
    std::int64_t first_index() const noexcept { return kind_ == Kind::chaos ? degree_ : 1; }
    double variance(std::int64_t n) const;
    double sigma(std::int64_t n) const;
    SigmaProfile sigma_profile() const;
    /// phi whose B(phi) space holds the normalized increments, when built in.
    std::optional<PhiFunction> phi() const;

    ModelState initial_state() const;
    void step(ModelState& state, double unit_noise) const;
    double read_S(const ModelState& state) const;

private:
    MartingaleModel(Kind kind, std::string label) : kind_(kind), label_(std::move(label)) {}

    Kind kind_;
    std::string label_;
    int degree_ = 1;
    double beta_ = 1.0;
    NoiseKind noise_ = NoiseKind::rademacher;
    double weibull_r_ = 2.0;
};

/// Symmetric unit-variance Weibull draw from a uniform in (0, 1] and a sign.
double weibull_unit_noise(double r, double uniform, bool positive);

/// Checks 2 S(n) = (sum eps)^2 - sum eps^2 for the degree-2 chaos of `path`
/// (first n entries), exactly.
bool chaos_identity_check(std::span<const std::int64_t> path, std::size_t n);

SigmaProfile power_law_surrogate(double gamma, SigmaProfile::SlowFactor factor = SigmaProfile::SlowFactor::one);

/// S(n) on all 2^n Rademacher sign paths; bit i of the path index is the
/// sign of eps(i + 1) (1 -> +1). n <= 20.
std::vector<double> enumerate_final_values(const MartingaleModel& model, int n);

/**
 * x -> P(S(n) / sigma(n) > x). Exact: binomial for the degree-1 chaos at any
 * n, enumeration for other Rademacher models with n <= 20.
 */
std::function<double(double)> exact_single_n_tail(const MartingaleModel& model, std::int64_t n);

}  // namespace lilbound
