#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lilbound {

/// Deterministic positive nondecreasing divisor v(n) of the normalized maximum.
class NormingSequence {
public:
    enum class Kind { iterated_log, constant, table };

    /// v_r(n) = [log log(n + 3)]^{1/r}
    static NormingSequence iterated_log(double r);
    static NormingSequence constant(double c);
    /// v(n) = values[n - 1]; undefined past the end.
    static NormingSequence table(std::vector<double> values);

    Kind kind() const noexcept { return kind_; }
    double r() const noexcept { return param_; }
    const std::string& label() const noexcept { return label_; }

    double operator()(double n) const;
    /// v at n = exp(log_n); works for n far beyond double range. NaN when
    /// the sequence is not defined there.
    double at_log(double log_n) const;
    bool defined_everywhere() const noexcept { return kind_ != Kind::table; }

private:
    NormingSequence(Kind kind, double param, std::string label)
        : kind_(kind), param_(param), label_(std::move(label)) {}

    Kind kind_;
    double param_;
    std::string label_;
    std::shared_ptr<const std::vector<double>> table_;
};

/// Standard-deviation profile sigma(n) of a martingale.
class SigmaProfile {
public:
    enum class Kind { model_exact, power_law, table };
    /// Slowly varying factor of the power-law surrogate.
    enum class SlowFactor { one, log, inverse_log };

    /// n^gamma * M(n) with M in {1, log(n + e), 1 / log(n + e)}.
    static SigmaProfile power_law(double gamma, SlowFactor factor = SlowFactor::one);
    /// `log_sigma` maps log n to log sigma(n) (-inf where sigma vanishes).
    static SigmaProfile model_exact(std::string label, std::function<double(double)> log_sigma);
    /// sigma(n) = values[n - 1]; undefined past the end.
    static SigmaProfile table(std::vector<double> values);

    Kind kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }
    double gamma() const noexcept { return gamma_; }

    double operator()(double n) const;
    /// log sigma at n = exp(log_n). NaN when undefined.
    double log_at_log(double log_n) const;
    bool defined_everywhere() const noexcept { return kind_ != Kind::table; }

private:
    SigmaProfile(Kind kind, std::string label) : kind_(kind), label_(std::move(label)) {}

    Kind kind_;
    std::string label_;
    double gamma_ = 0.0;
    SlowFactor factor_ = SlowFactor::one;
    std::function<double(double)> log_sigma_;
    std::shared_ptr<const std::vector<double>> table_;
};

/// log(n + c) for n = exp(log_n) without overflowing n.
double log_shifted(double log_n, double c);

/// Checks f(n) nondecreasing on a log grid of n in [1, n_max] (log domain).
bool nondecreasing_on_log_grid(const std::function<double(double)>& f_at_log, double log_n_max,
                               int points = 256);

}  // namespace lilbound
