#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lilbound/phi.hpp"

namespace lilbound {

/// I.i.d. draws of a real random variable. Entries must be finite.
class Sample {
public:
    explicit Sample(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double mean() const;
    /// Unbiased standard deviation (0 for a single draw).
    double stdev() const;
    Sample scaled(double factor) const;

private:
    std::vector<double> values_;
};

/// U(xi, x) = max(P(xi > x), P(xi < -x)) under the empirical law.
double tail_U(const Sample& sample, double x);

/// Rejects samples whose mean exceeds three standard errors.
void require_centered(const Sample& sample);

struct BNormResult {
    double value = 0.0;          ///< may be +inf
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::size_t lambda_points = 0;
    std::string diagnostic;
};

/**
 * Smallest tau with E exp(lambda xi) <= exp(phi(lambda tau)) on a lambda grid,
 * using the empirical moment generating function.
 *
 * The grid is 200 log-spaced points in units of the sample's RMS scale,
 * starting at 1e-3 and ending where the relative standard error of the
 * empirical MGF reaches 50% (and no further than 50 scale units or phi's
 * lambda0). Returns +inf with a diagnostic when log m(lambda) is beyond the
 * range of phi.
 */
BNormResult bphi_norm_detailed(const Sample& sample, const PhiFunction& phi);
double bphi_norm(const Sample& sample, const PhiFunction& phi);

/// Integer and half-integer p on [2, log2(M)].
std::vector<double> moment_grid(std::size_t sample_size);

/// sup over the moment grid of |xi|_p / psi(p).
double gpsi_norm(const Sample& sample, const PhiFunction& phi);

/// 2 exp(-u / (c3 * g_norm)).
double tail_bound_from_gnorm(double g_norm, double u, double c3);

struct NormEstimate {
    double b_norm = 0.0;
    double g_norm = 0.0;
    double lambda_grid_min = 0.0;
    double lambda_grid_max = 0.0;
    std::size_t lambda_points = 0;
    double p_max = 0.0;
    std::size_t p_points = 0;
    double mean_abs = 0.0;
    std::size_t sample_size = 0;
    std::string phi_label;
    std::string diagnostic;
};

NormEstimate estimate_norms(const Sample& sample, const PhiFunction& phi);

}  // namespace lilbound
