#include "lilbound/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lilbound/errors.hpp"

namespace lilbound {

namespace {

constexpr std::size_t kLambdaPoints = 200;
constexpr std::size_t kLambdaScan = 400;
constexpr double kLambdaFloor = 1e-3;
constexpr double kLambdaCeiling = 50.0;
constexpr double kMaxRelativeError = 0.5;

/// log of the empirical MGF of z at t, via log-sum-exp.
double log_mgf(std::span<const double> z, double t) {
    double peak = -kInf;
    for (double v : z) peak = std::max(peak, t * v);
    double acc = 0.0;
    for (double v : z) acc += std::exp(t * v - peak);
    return peak + std::log(acc) - std::log(static_cast<double>(z.size()));
}

double mgf_relative_error(std::span<const double> z, double t) {
    const double log_ratio = log_mgf(z, 2.0 * t) - 2.0 * log_mgf(z, t);
    return std::sqrt(std::max(0.0, std::expm1(log_ratio)) / static_cast<double>(z.size()));
}

}  // namespace

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw SizeError("sample: no values");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("sample: non-finite value");
}

double Sample::mean() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double Sample::stdev() const {
    if (values_.size() < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double v : values_) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values_.size() - 1));
}

Sample Sample::scaled(double factor) const {
    std::vector<double> out(values_);
    for (double& v : out) v *= factor;
    return Sample(std::move(out));
}

double tail_U(const Sample& sample, double x) {
    if (!(x >= 0.0)) throw DomainError("tail_U: x must be >= 0");
    std::size_t above = 0, below = 0;
    for (double v : sample.values()) {
        above += v > x;
        below += v < -x;
    }
    return static_cast<double>(std::max(above, below)) / static_cast<double>(sample.size());
}

void require_centered(const Sample& sample) {
    const double m = sample.mean();
    const double se = sample.stdev() / std::sqrt(static_cast<double>(sample.size()));
    if (std::abs(m) > 3.0 * se) {
        std::ostringstream msg;
        msg << "sample is not centered: |mean| = " << std::abs(m) << " exceeds 3 standard errors ("
            << 3.0 * se << ")";
        throw CenteringError(msg.str());
    }
}

BNormResult bphi_norm_detailed(const Sample& sample, const PhiFunction& phi) {
    require_centered(sample);
    BNormResult result;
    const auto values = sample.values();
    double ss = 0.0;
    for (double v : values) ss += v * v;
    const double scale = std::sqrt(ss / static_cast<double>(values.size()));
    if (scale == 0.0) {
        result.diagnostic = "degenerate sample (all zeros)";
        return result;
    }
    std::vector<double> z(values.begin(), values.end());
    for (double& v : z) v /= scale;

    // Grid in scale units; lambda = t / scale.
    const double t_cap = std::min(kLambdaCeiling, phi.search_limit() * scale);
    const double t_min = std::min(kLambdaFloor, t_cap);
    double t_max = t_min;
    for (double t : log_spaced(t_min, t_cap, kLambdaScan)) {
        if (mgf_relative_error(z, t) > kMaxRelativeError || mgf_relative_error(z, -t) > kMaxRelativeError)
            break;
        t_max = t;
    }
    result.lambda_min = t_min / scale;
    result.lambda_max = t_max / scale;
    const auto grid = log_spaced(t_min, t_max, t_max > t_min ? kLambdaPoints : 1);
    result.lambda_points = grid.size();

    double best = 0.0;
    for (double t : grid) {
        for (double sign : {1.0, -1.0}) {
            const double lm = log_mgf(z, sign * t);
            if (lm <= 0.0) continue;
            double inv = 0.0;
            try {
                inv = phi_inverse(phi, lm);
            } catch (const UnreachableValueError& e) {
                std::ostringstream msg;
                msg << "empirical log-MGF " << lm << " at lambda = " << sign * t / scale
                    << " is outside the range of " << phi.label() << ": " << e.what();
                result.value = kInf;
                result.diagnostic = msg.str();
                return result;
            }
            best = std::max(best, inv / t);
        }
    }
    result.value = best * scale;
    return result;
}

double bphi_norm(const Sample& sample, const PhiFunction& phi) {
    return bphi_norm_detailed(sample, phi).value;
}

std::vector<double> moment_grid(std::size_t sample_size) {
    const double p_max = std::log2(static_cast<double>(sample_size));
    if (p_max < 2.0) throw SizeError("moment grid needs at least 4 draws");
    std::vector<double> grid;
    for (double p = 2.0; p <= p_max; p += 0.5) grid.push_back(p);
    return grid;
}

double gpsi_norm(const Sample& sample, const PhiFunction& phi) {
    const auto grid = moment_grid(sample.size());
    const auto values = sample.values();
    double amax = 0.0;
    for (double v : values) amax = std::max(amax, std::abs(v));
    if (amax == 0.0) return 0.0;
    double best = 0.0;
    for (double p : grid) {
        double acc = 0.0;
        for (double v : values) acc += std::pow(std::abs(v) / amax, p);
        const double moment = amax * std::pow(acc / static_cast<double>(values.size()), 1.0 / p);
        best = std::max(best, moment / psi(phi, p));
    }
    return best;
}

double tail_bound_from_gnorm(double g_norm, double u, double c3) {
    if (!(g_norm > 0.0) || !(u > 0.0) || !(c3 > 0.0))
        throw DomainError("tail_bound_from_gnorm: arguments must be positive");
    return 2.0 * std::exp(-u / (c3 * g_norm));
}

NormEstimate estimate_norms(const Sample& sample, const PhiFunction& phi) {
    NormEstimate est;
    const auto b = bphi_norm_detailed(sample, phi);
    est.b_norm = b.value;
    est.lambda_grid_min = b.lambda_min;
    est.lambda_grid_max = b.lambda_max;
    est.lambda_points = b.lambda_points;
    est.diagnostic = b.diagnostic;
    est.g_norm = gpsi_norm(sample, phi);
    const auto grid = moment_grid(sample.size());
    est.p_max = grid.back();
    est.p_points = grid.size();
    est.mean_abs = std::abs(sample.mean());
    est.sample_size = sample.size();
    est.phi_label = phi.label();
    return est;
}

}  // namespace lilbound
