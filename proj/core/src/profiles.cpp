#include "lilbound/profiles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lilbound/errors.hpp"

namespace lilbound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double table_lookup(const std::vector<double>& values, double log_n) {
    const double n = std::exp(log_n);
    const double idx = std::nearbyint(n);
    if (!(idx >= 1.0) || idx > static_cast<double>(values.size())) return kNaN;
    return values[static_cast<std::size_t>(idx) - 1];
}

}  // namespace

double log_shifted(double log_n, double c) {
    // log(n + c) = log n + log1p(c / n)
    if (log_n > 700.0) return log_n + std::log1p(c * std::exp(-log_n));
    return std::log(std::exp(log_n) + c);
}

NormingSequence NormingSequence::iterated_log(double r) {
    if (!(r > 0.0)) throw DomainError("iterated-log norming requires r > 0");
    std::ostringstream label;
    label << "loglog:r=" << r;
    return NormingSequence(Kind::iterated_log, r, label.str());
}

NormingSequence NormingSequence::constant(double c) {
    if (!(c > 0.0)) throw DomainError("constant norming requires c > 0");
    std::ostringstream label;
    label << "const:c=" << c;
    return NormingSequence(Kind::constant, c, label.str());
}

NormingSequence NormingSequence::table(std::vector<double> values) {
    if (values.empty()) throw DomainError("norming table is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw DomainError("norming table: values must be positive");
        if (i > 0 && values[i] < values[i - 1]) throw DomainError("norming table: values must be nondecreasing");
    }
    NormingSequence seq(Kind::table, 0.0, "table");
    seq.table_ = std::make_shared<const std::vector<double>>(std::move(values));
    return seq;
}

double NormingSequence::operator()(double n) const { return at_log(std::log(n)); }

double NormingSequence::at_log(double log_n) const {
    switch (kind_) {
        case Kind::iterated_log:
            return std::pow(std::log(log_shifted(log_n, 3.0)), 1.0 / param_);
        case Kind::constant:
            return param_;
        case Kind::table:
            return table_lookup(*table_, log_n);
    }
    return kNaN;
}

SigmaProfile SigmaProfile::power_law(double gamma, SlowFactor factor) {
    if (!(gamma > 0.0)) throw DomainError("power-law sigma requires gamma > 0");
    std::ostringstream label;
    label << "powerlaw:gamma=" << gamma;
    if (factor == SlowFactor::log) label << ",M=log";
    if (factor == SlowFactor::inverse_log) label << ",M=invlog";
    SigmaProfile p(Kind::power_law, label.str());
    p.gamma_ = gamma;
    p.factor_ = factor;
    return p;
}

SigmaProfile SigmaProfile::model_exact(std::string label, std::function<double(double)> log_sigma) {
    SigmaProfile p(Kind::model_exact, std::move(label));
    p.log_sigma_ = std::move(log_sigma);
    return p;
}

SigmaProfile SigmaProfile::table(std::vector<double> values) {
    if (values.empty()) throw DomainError("sigma table is empty");
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("sigma table: values must be positive");
    SigmaProfile p(Kind::table, "table");
    p.table_ = std::make_shared<const std::vector<double>>(std::move(values));
    return p;
}

double SigmaProfile::operator()(double n) const { return std::exp(log_at_log(std::log(n))); }

double SigmaProfile::log_at_log(double log_n) const {
    switch (kind_) {
        case Kind::power_law: {
            double out = gamma_ * log_n;
            if (factor_ == SlowFactor::log) out += std::log(log_shifted(log_n, std::exp(1.0)));
            if (factor_ == SlowFactor::inverse_log) out -= std::log(log_shifted(log_n, std::exp(1.0)));
            return out;
        }
        case Kind::model_exact:
            return log_sigma_(log_n);
        case Kind::table:
            return std::log(table_lookup(*table_, log_n));
    }
    return kNaN;
}

bool nondecreasing_on_log_grid(const std::function<double(double)>& f_at_log, double log_n_max,
                               int points) {
    double prev = f_at_log(0.0);
    for (int i = 1; i < points; ++i) {
        const double log_n = log_n_max * static_cast<double>(i) / static_cast<double>(points - 1);
        const double cur = f_at_log(log_n);
        if (std::isnan(cur)) break;
        if (cur < prev - 1e-12 * std::abs(prev)) return false;
        prev = cur;
    }
    return true;
}

}  // namespace lilbound
