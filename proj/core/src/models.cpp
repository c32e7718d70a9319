#include "lilbound/models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "lilbound/errors.hpp"

namespace lilbound {

int128 binomial128(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    int128 out = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        // out * (n - k + i) / i stays integral at every step.
        int128 next = 0;
        if (__builtin_mul_overflow(out, static_cast<int128>(n - k + i), &next))
            throw DomainError("binomial coefficient overflows 128 bits");
        out = next / i;
    }
    return out;
}

double binomial_double(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    return std::exp(std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(n - k) + 1.0));
}

ChaosState::ChaosState(int degree) : degree_(degree) {
    if (degree < 1) throw DomainError("chaos degree must be >= 1");
    narrow_.assign(static_cast<std::size_t>(degree) + 1, 0);
    narrow_[0] = 1;
}

void ChaosState::step(std::int64_t eps) {
    if (!wide_) {
        bool overflow = false;
        for (int j = degree_; j >= 1 && !overflow; --j) {
            std::int64_t prod = 0;
            std::int64_t sum = 0;
            overflow = __builtin_mul_overflow(eps, narrow_[j - 1], &prod) ||
                       __builtin_add_overflow(narrow_[j], prod, &sum);
        }
        if (!overflow) {
            // Descending j reads e[j - 1] before it is updated.
            for (int j = degree_; j >= 1; --j) narrow_[j] += eps * narrow_[j - 1];
            ++n_;
            return;
        }
        wide_values_.assign(narrow_.begin(), narrow_.end());
        wide_ = true;
    }
    for (int j = degree_; j >= 1; --j) {
        int128 prod = 0;
        if (__builtin_mul_overflow(static_cast<int128>(eps), wide_values_[j - 1], &prod) ||
            __builtin_add_overflow(wide_values_[j], prod, &wide_values_[j]))
            throw DomainError("chaos state overflows 128 bits");
    }
    ++n_;
}

int128 ChaosState::e(int j) const {
    if (j < 0 || j > degree_) throw DomainError("chaos coefficient index out of range");
    return wide_ ? wide_values_[static_cast<std::size_t>(j)] : narrow_[static_cast<std::size_t>(j)];
}

MartingaleModel MartingaleModel::chaos(int d) {
    if (d < 1) throw DomainError("chaos degree must be >= 1");
    MartingaleModel m(Kind::chaos, "chaos:d=" + std::to_string(d));
    m.degree_ = d;
    return m;
}

MartingaleModel MartingaleModel::weighted_iid(double beta, NoiseKind noise, double weibull_r) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("weighted model requires beta > 0");
    if (noise == NoiseKind::weibull && !(weibull_r > 0.0)) throw DomainError("Weibull noise requires r > 0");
    std::ostringstream label;
    label << "weightedA:beta=" << beta;
    if (noise == NoiseKind::weibull) label << ",noise=weibull,r=" << weibull_r;
    MartingaleModel m(Kind::weighted_iid, label.str());
    m.beta_ = beta;
    m.noise_ = noise;
    m.weibull_r_ = weibull_r;
    return m;
}

double MartingaleModel::variance(std::int64_t n) const {
    if (n < 1) return 0.0;
    if (kind_ == Kind::chaos) {
        // Exact while C(n, d) fits in 128 bits, which covers every simulated horizon.
        try {
            return static_cast<double>(binomial128(n, degree_));
        } catch (const DomainError&) {
            return binomial_double(n, degree_);
        }
    }
    return beta_ * beta_ * (-std::expm1(-static_cast<double>(n) * std::log(4.0))) / 3.0;
}

double MartingaleModel::sigma(std::int64_t n) const { return std::sqrt(variance(n)); }

SigmaProfile MartingaleModel::sigma_profile() const {
    if (kind_ == Kind::chaos) {
        const int d = degree_;
        const double log_fact = std::lgamma(static_cast<double>(d) + 1.0);
        return SigmaProfile::model_exact(label_, [d, log_fact](double log_n) {
            const double n = std::exp(log_n);
            if (n < static_cast<double>(d) - 1e-9) return -kInf;
            double acc = 0.0;
            for (int i = 0; i < d; ++i) acc += log_n + std::log1p(-static_cast<double>(i) * std::exp(-log_n));
            return 0.5 * (acc - log_fact);
        });
    }
    const double log_beta = std::log(beta_);
    return SigmaProfile::model_exact(label_, [log_beta](double log_n) {
        const double n = std::exp(log_n);
        return log_beta + 0.5 * (std::log1p(-std::exp(-n * std::log(4.0))) - std::log(3.0));
    });
}

std::optional<PhiFunction> MartingaleModel::phi() const {
    if (kind_ == Kind::chaos) {
        if (degree_ == 1) return phi2();
        if (degree_ == 2) return subexponential_phi();
        return std::nullopt;
    }
    if (noise_ == NoiseKind::rademacher) return phi2();
    if (weibull_r_ >= 2.0) return power_phi(weibull_r_ / (weibull_r_ - 1.0));
    return std::nullopt;
}

ModelState MartingaleModel::initial_state() const {
    ModelState state;
    if (kind_ == Kind::chaos) state.chaos.emplace(degree_);
    return state;
}

void MartingaleModel::step(ModelState& state, double unit_noise) const {
    ++state.n;
    if (kind_ == Kind::chaos) {
        const double rounded = std::nearbyint(unit_noise);
        if (rounded != unit_noise) throw DomainError("chaos models take integer noise");
        state.chaos->step(static_cast<std::int64_t>(rounded));
        return;
    }
    state.s += std::ldexp(beta_ * unit_noise, -static_cast<int>(std::min<std::int64_t>(state.n, 2000)));
}

double MartingaleModel::read_S(const ModelState& state) const {
    if (kind_ == Kind::chaos) return static_cast<double>(state.chaos->value());
    return state.s;
}

double weibull_unit_noise(double r, double uniform, bool positive) {
    // P(|X| > x) = exp(-(x/s)^r), Var X = s^2 Gamma(1 + 2/r).
    const double scale = 1.0 / std::sqrt(std::tgamma(1.0 + 2.0 / r));
    const double mag = scale * std::pow(-std::log(uniform), 1.0 / r);
    return positive ? mag : -mag;
}

bool chaos_identity_check(std::span<const std::int64_t> path, std::size_t n) {
    if (n > path.size()) throw DomainError("identity check: n exceeds path length");
    ChaosState state(2);
    int128 sum1 = 0;
    int128 sum2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        state.step(path[i]);
        sum1 += path[i];
        sum2 += static_cast<int128>(path[i]) * path[i];
    }
    return 2 * state.value() == sum1 * sum1 - sum2;
}

SigmaProfile power_law_surrogate(double gamma, SigmaProfile::SlowFactor factor) {
    return SigmaProfile::power_law(gamma, factor);
}

std::vector<double> enumerate_final_values(const MartingaleModel& model, int n) {
    if (n < 0 || n > 20) throw SizeError("enumeration supports 0 <= n <= 20");
    if (!model.rademacher()) throw DomainError("enumeration needs Rademacher noise");
    const std::size_t paths = std::size_t{1} << n;
    std::vector<double> out(paths);
    for (std::size_t mask = 0; mask < paths; ++mask) {
        ModelState state = model.initial_state();
        for (int i = 0; i < n; ++i) model.step(state, (mask >> i) & 1U ? 1.0 : -1.0);
        out[mask] = model.read_S(state);
    }
    return out;
}

std::function<double(double)> exact_single_n_tail(const MartingaleModel& model, std::int64_t n) {
    if (n < model.first_index()) throw DegenerateSigmaError("sigma(n) = 0 below the first index");
    const double sigma = model.sigma(n);
    if (model.kind() == MartingaleModel::Kind::chaos && model.degree() == 1) {
        // S = 2K - n with K ~ Bin(n, 1/2); upper[k] = P(K >= k).
        auto upper = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n) + 2, 0.0);
        const double log_half_n = -static_cast<double>(n) * std::log(2.0);
        if (n <= 62) {
            // Integer counts keep the probabilities correctly rounded, so they
            // compare exactly against enumerated frequencies.
            std::uint64_t count = 0;
            for (std::int64_t k = n; k >= 0; --k) {
                count += static_cast<std::uint64_t>(binomial128(n, k));
                (*upper)[static_cast<std::size_t>(k)] = std::ldexp(static_cast<double>(count), -static_cast<int>(n));
            }
        }
        for (std::int64_t k = n; k >= 0 && n > 62; --k) {
            const double lp = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                              std::lgamma(static_cast<double>(n - k) + 1.0) + log_half_n;
            (*upper)[static_cast<std::size_t>(k)] = (*upper)[static_cast<std::size_t>(k) + 1] + std::exp(lp);
        }
        return [upper, n, sigma](double x) {
            // Smallest k with 2k - n > x sigma.
            const double threshold = (x * sigma + static_cast<double>(n)) / 2.0;
            double k = std::floor(threshold) + 1.0;
            if (k < 0.0) k = 0.0;
            if (k > static_cast<double>(n)) return 0.0;
            return std::min(1.0, (*upper)[static_cast<std::size_t>(k)]);
        };
    }
    if (n > 20) throw SizeError("exact single-index tail needs n <= 20 for this model");
    auto values = std::make_shared<std::vector<double>>(enumerate_final_values(model, static_cast<int>(n)));
    std::sort(values->begin(), values->end());
    return [values, sigma](double x) {
        const auto it = std::upper_bound(values->begin(), values->end(), x * sigma);
        return static_cast<double>(values->end() - it) / static_cast<double>(values->size());
    };
}

}  // namespace lilbound
