#include "lilbound/bound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lilbound/errors.hpp"
#include "lilbound/parallel.hpp"

namespace lilbound {

namespace {

// Doubles represent every integer up to 2^53.
constexpr double kExactLimit = 9007199254740992.0;
constexpr double kGolden = 0.6180339887498949;
// Monotone-profile screen reaches n = e^40 (about 2.4e17).
constexpr double kProfileCheckLogN = 40.0;

enum class TailKind { certified, divergent, uncertified };

struct TailCertificate {
    TailKind kind = TailKind::uncertified;
    double bound = kInf;
};

template <class Term>
TailCertificate tail_certificate(const Term& term, double K, double last_term) {
    constexpr double kGrowth = 1.25;
    constexpr double kSettled = 1e-3;
    constexpr double kMaxIndex = 1e15;
    constexpr double kFarFactor = 64.0;

    double bound_sum = 0.0;
    double prev_t = last_term;
    double prev_b = -1.0;
    double m = 1.0;
    bool monotone = true;
    std::vector<double> ratios;
    std::vector<double> ratio_m;
    while (K + m < kMaxIndex) {
        const double m_next = std::floor(m * kGrowth) + 1.0;
        const double len = m_next - m;
        const double t = term(K + m);
        // Rising terms void the block bound but still allow a divergence verdict.
        if (t > prev_t * (1.0 + 1e-12)) monotone = false;
        if (t == 0.0 && monotone) return {TailKind::certified, bound_sum};
        const double b = len * t;
        bound_sum += b;
        if (prev_b > 0.0) {
            ratios.push_back(b / prev_b);
            ratio_m.push_back(m);
        }
        const std::size_t n = ratios.size();
        if (n >= 4 && ratio_m[n - 4] >= kFarFactor * K) {
            double rho = 0.0;
            double spread = 0.0;
            for (std::size_t i = n - 3; i < n; ++i) {
                rho = std::max(rho, ratios[i]);
                spread = std::max(spread, std::abs(ratios[i] - ratios[i - 1]));
            }
            if (spread < kSettled) {
                if (rho >= 1.0 - kSettled) return {TailKind::divergent, kInf};
                const double rho_bound = rho + 2.0 * spread;
                if (!monotone) return {TailKind::uncertified, kInf};
                if (rho_bound < 1.0)
                    return {TailKind::certified, bound_sum + b * rho_bound / (1.0 - rho_bound)};
            }
        }
        prev_b = b;
        prev_t = t;
        m = m_next;
    }
    return {TailKind::uncertified, kInf};
}

void require_monotone_profiles(const BoundProblem& problem) {
    const auto offset = static_cast<double>(problem.index_offset);
    auto shift = [offset](double log_n) { return offset > 0.0 ? log_shifted(log_n, offset) : log_n; };
    const bool sigma_ok = nondecreasing_on_log_grid(
        [&](double log_n) { return problem.sigma.log_at_log(shift(log_n)); }, kProfileCheckLogN);
    if (!sigma_ok) throw DomainError("sigma profile '" + problem.sigma.label() + "' must be nondecreasing");
    const bool v_ok = nondecreasing_on_log_grid(
        [&](double log_n) { return problem.norming.at_log(shift(log_n)); }, kProfileCheckLogN);
    if (!v_ok) throw DomainError("norming sequence '" + problem.norming.label() + "' must be nondecreasing");
}

}  // namespace

Partition::Partition(std::vector<std::int64_t> a_values) : a_(std::move(a_values)) {
    if (a_.size() < 2) throw DomainError("partition needs at least one block");
    if (a_.front() != 1) throw DomainError("partition must start at A(1) = 1");
    for (std::size_t i = 1; i < a_.size(); ++i) {
        if (a_[i] < a_[i - 1] + 2) {
            std::ostringstream msg;
            msg << "partition block " << i << " has length < 2 (A = " << a_[i - 1] << ", next A = " << a_[i] << ")";
            throw DomainError(msg.str());
        }
    }
}

std::int64_t Partition::a(std::size_t k) const {
    if (k < 1 || k > depth()) throw DomainError("block index outside partition depth");
    return a_[k - 1];
}

std::int64_t Partition::b(std::size_t k) const {
    if (k < 1 || k > depth()) throw DomainError("block index outside partition depth");
    return a_[k] - 1;
}

std::vector<std::int64_t> Partition::b_values() const {
    std::vector<std::int64_t> out;
    out.reserve(depth());
    for (std::size_t i = 1; i < a_.size(); ++i) out.push_back(a_[i] - 1);
    return out;
}

GeometricFamily::GeometricFamily(double ratio) : ratio_(ratio), log_ratio_(std::log(ratio)) {
    if (!(ratio >= 2.0) || !std::isfinite(ratio)) throw DomainError("geometric partition requires ratio Q >= 2");
    exact_a_.push_back(1);
    for (int k = 1;; ++k) {
        const double target = std::nearbyint(std::pow(ratio, k));
        if (!(target < kExactLimit)) break;
        exact_a_.push_back(std::max(exact_a_.back() + 2, static_cast<std::int64_t>(target)));
    }
}

void GeometricFamily::log_block(double k, double& log_a, double& log_b) const {
    const auto size = static_cast<double>(exact_a_.size());
    if (k + 1.0 <= size) {
        const auto idx = static_cast<std::size_t>(k);
        log_a = std::log(static_cast<double>(exact_a_[idx - 1]));
        log_b = std::log(static_cast<double>(exact_a_[idx] - 1));
        return;
    }
    log_a = k <= size ? std::log(static_cast<double>(exact_a_[static_cast<std::size_t>(k) - 1]))
                      : (k - 1.0) * log_ratio_;
    const double log_next = k * log_ratio_;
    log_b = log_next + std::log1p(-std::exp(-log_next));
}

Partition GeometricFamily::materialize(std::size_t depth) const {
    if (depth < 1) throw DomainError("partition depth must be >= 1");
    if (depth + 1 > exact_a_.size()) throw DomainError("partition depth exceeds exact integer range");
    return Partition(std::vector<std::int64_t>(exact_a_.begin(), exact_a_.begin() + static_cast<std::ptrdiff_t>(depth + 1)));
}

Partition geometric_partition(double ratio, std::size_t depth) {
    return GeometricFamily(ratio).materialize(depth);
}

double q_term_log(double log_a, double log_b, const BoundProblem& problem, double u) {
    if (!(u > 0.0)) throw DomainError("q_term requires u > 0");
    const auto offset = static_cast<double>(problem.index_offset);
    const double log_na = offset > 0.0 ? log_shifted(log_a, offset) : log_a;
    const double log_nb = offset > 0.0 ? log_shifted(log_b, offset) : log_b;
    const double lsa = problem.sigma.log_at_log(log_na);
    const double lsb = problem.sigma.log_at_log(log_nb);
    const double v = problem.norming.at_log(log_na);
    if (std::isnan(lsa) || std::isnan(lsb) || std::isnan(v))
        throw DomainError("sigma or norming undefined at n = " + std::to_string(std::exp(log_nb)));
    if (lsa == -kInf || lsb == -kInf) throw DegenerateSigmaError("sigma vanishes inside a block");
    const double x = u * std::exp(lsa - lsb) * v;
    return std::exp(-conjugate(problem.phi, x));
}

double q_term(std::size_t k, const Partition& partition, const BoundProblem& problem, double u) {
    const double log_a = std::log(static_cast<double>(partition.a(k)));
    const double log_b = std::log(static_cast<double>(partition.b(k)));
    return q_term_log(log_a, log_b, problem, u);
}

double QSumResult::certified() const noexcept {
    if (divergent) return kInf;
    return partial_sum + residual;
}

QSumResult q_sum(const GeometricFamily& family, const BoundProblem& problem, double u,
                 const QSumOptions& options) {
    if (!(u > 0.0)) throw DomainError("q_sum requires u > 0");
    if (!(options.tolerance > 0.0)) throw DomainError("q_sum tolerance must be positive");
    if (options.k_max < 1) throw DomainError("q_sum k_max must be >= 1");
    if (!problem.sigma.defined_everywhere() || !problem.norming.defined_everywhere())
        throw DomainError("q_sum needs sigma and norming defined for every n (tables are finite)");

    auto term = [&](double k) {
        double log_a = 0.0;
        double log_b = 0.0;
        family.log_block(k, log_a, log_b);
        return q_term_log(log_a, log_b, problem, u);
    };

    QSumResult result;
    double sum = 0.0;
    double last = 1.0;
    std::int64_t k = 0;
    std::int64_t stage = 16;
    for (;;) {
        const std::int64_t K = std::min(stage, options.k_max);
        while (k < K) {
            ++k;
            last = term(static_cast<double>(k));
            sum += last;
        }
        result.partial_sum = sum;
        result.k_used = K;
        const TailCertificate cert = tail_certificate(term, static_cast<double>(K), last);
        if (cert.kind == TailKind::divergent) {
            result.divergent = true;
            result.residual = kInf;
            return result;
        }
        result.residual = cert.bound;
        if (cert.kind == TailKind::certified && cert.bound < options.tolerance) {
            result.converged = true;
            return result;
        }
        if (K >= options.k_max) return result;
        stage *= 4;
    }
}

std::vector<double> default_ratio_grid() { return log_spaced(2.0, 16.0, 12); }

bool BoundReport::all_divergent() const {
    return std::all_of(points.begin(), points.end(), [](const BoundPoint& p) { return !std::isfinite(p.raw_bound); });
}

bool BoundReport::flagged() const {
    return std::any_of(points.begin(), points.end(),
                       [](const BoundPoint& p) { return std::isfinite(p.raw_bound) && !p.converged; });
}

std::vector<double> BoundReport::u_grid() const {
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p.u);
    return out;
}

std::vector<double> BoundReport::bounds() const {
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p.bound);
    return out;
}

BoundReport theorem_bound(const BoundProblem& problem, std::span<const double> u_grid, double C,
                          const BoundOptions& options) {
    if (!(C > 0.0) || !std::isfinite(C)) throw DomainError("theorem_bound requires C > 0");
    for (double u : u_grid)
        if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("theorem_bound requires every u > 0");
    std::vector<double> ratios = options.ratio_grid.empty() ? default_ratio_grid() : options.ratio_grid;
    for (double q : ratios)
        if (!(q >= 2.0)) throw DomainError("ratio grid entries must be >= 2");
    std::sort(ratios.begin(), ratios.end());
    ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
    require_monotone_profiles(problem);

    BoundReport report;
    report.C_used = C;
    report.tolerance = options.q_sum.tolerance;
    report.ratio_grid = ratios;
    report.phi_label = problem.phi.label();
    report.sigma_label = problem.sigma.label();
    report.norming_label = problem.norming.label();
    report.points.resize(u_grid.size());

    auto solve = [&](double u) {
        BoundPoint point;
        point.u = u;
        auto consider = [&](double ratio) {
            const QSumResult r = q_sum(GeometricFamily(ratio), problem, C * u, options.q_sum);
            const double value = r.certified();
            if (value < point.raw_bound || point.ratio == 0.0) {
                point.raw_bound = value;
                point.ratio = ratio;
                point.k_used = r.k_used;
                point.partial_sum = r.partial_sum;
                point.residual = r.residual;
                point.converged = r.converged;
                point.divergent = r.divergent;
            }
            return value;
        };
        std::size_t best = 0;
        double best_value = kInf;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            const double value = consider(ratios[i]);
            if (value < best_value) {
                best_value = value;
                best = i;
            }
        }
        if (options.refine_iterations > 0 && ratios.size() >= 2 && std::isfinite(best_value)) {
            double a = std::log(ratios[best == 0 ? 0 : best - 1]);
            double b = std::log(ratios[std::min(best + 1, ratios.size() - 1)]);
            double c = b - kGolden * (b - a);
            double d = a + kGolden * (b - a);
            double fc = consider(std::exp(c));
            double fd = consider(std::exp(d));
            for (int it = 0; it < options.refine_iterations; ++it) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - kGolden * (b - a);
                    fc = consider(std::exp(c));
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + kGolden * (b - a);
                    fd = consider(std::exp(d));
                }
            }
        }
        point.bound = point.raw_bound;
        return point;
    };

    parallel_for_chunks(u_grid.size(), resolve_workers(options.workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) report.points[i] = solve(u_grid[i]);
    });

    std::vector<std::size_t> order(u_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return u_grid[x] < u_grid[y]; });
    double running = kInf;
    for (std::size_t idx : order) {
        running = std::min(running, report.points[idx].raw_bound);
        report.points[idx].bound = running;
    }
    return report;
}

RateFit rate_check(const BoundProblem& problem, double r, std::span<const double> u_grid,
                   const RateFitOptions& options) {
    if (!(r > 0.0)) throw DomainError("rate check requires r > 0");
    if (const auto q = problem.phi.power_exponent()) {
        const double q_conj = *q / (*q - 1.0);
        if (std::abs(r - q_conj) > 1e-9 * q_conj) {
            std::ostringstream msg;
            msg << "power phi with exponent q = " << *q << " has conjugate exponent " << q_conj
                << "; r = " << r << " is not admissible";
            throw DomainError(msg.str());
        }
    }
    if (u_grid.empty()) throw DomainError("rate check needs a nonempty u grid");

    const BoundReport report = theorem_bound(problem, u_grid, options.C, options.bound);
    RateFit fit;
    fit.r = r;
    fit.u_grid.assign(u_grid.begin(), u_grid.end());
    double zy = 0.0;
    double zz = 0.0;
    bool all_finite = true;
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        const double y = std::log(report.points[i].bound);
        const double z = options.slowly_varying ? conjugate(problem.phi, u_grid[i]) : std::pow(u_grid[i], r);
        fit.log_bounds.push_back(y);
        fit.design.push_back(z);
        if (!std::isfinite(y)) {
            all_finite = false;
            continue;
        }
        zy += z * y;
        zz += z * z;
    }
    fit.C_hat = zz > 0.0 ? -zy / zz : std::nan("");
    if (!all_finite) {
        fit.max_relative_residual = kInf;
        fit.flagged = true;
        return fit;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        const double y = fit.log_bounds[i];
        const double dev = std::abs(y + fit.C_hat * fit.design[i]);
        worst = std::max(worst, y == 0.0 ? kInf : dev / std::abs(y));
    }
    fit.max_relative_residual = worst;
    fit.flagged = !(worst <= 0.1);
    return fit;
}

double lower_bound_single_n(const std::function<double(double)>& tail_at_n0, std::int64_t n0,
                            const NormingSequence& v, double u) {
    if (n0 < 1) throw DomainError("lower bound index n0 must be >= 1");
    return tail_at_n0(u * v(static_cast<double>(n0)));
}

}  // namespace lilbound
