#include "lilbound/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "lilbound/errors.hpp"
#include "lilbound/parallel.hpp"
#include "lilbound/phi.hpp"
#include "lilbound/rng.hpp"
#include "lilbound/stats.hpp"

namespace lilbound {

namespace {

constexpr int kMaxSimDegree = 16;

struct PathExtremes {
    std::vector<double> signed_max;
    std::vector<double> abs_max;
};

/// 1 / (sigma(n) v(n)) for n in [0, horizon]; zero below n_min.
std::vector<double> inverse_norming(const MartingaleModel& model, const NormingSequence& v, std::int64_t n_min,
                                    std::int64_t horizon) {
    std::vector<double> inv(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (std::int64_t n = n_min; n <= horizon; ++n) {
        const double sigma = model.sigma(n);
        const double vn = v(static_cast<double>(n));
        if (!(sigma > 0.0)) throw DegenerateSigmaError("sigma(" + std::to_string(n) + ") = 0 inside the sup range");
        if (!(vn > 0.0)) throw DomainError("norming undefined or non-positive at n = " + std::to_string(n));
        inv[static_cast<std::size_t>(n)] = 1.0 / (sigma * vn);
    }
    return inv;
}

bool chaos_fits_int64(int d, std::int64_t horizon) {
    for (int j = 0; j <= d; ++j)
        if (binomial_double(horizon, j) > 4.0e18) return false;
    return true;
}

class SignStream {
public:
    explicit SignStream(PathRng& rng) : rng_(rng) {}
    // +1 or -1 from successive bits of the stream.
    int next() {
        if (left_ == 0) {
            bits_ = rng_.next();
            left_ = 64;
        }
        const int s = (bits_ & 1U) ? 1 : -1;
        bits_ >>= 1;
        --left_;
        return s;
    }

private:
    PathRng& rng_;
    std::uint64_t bits_ = 0;
    int left_ = 0;
};

template <class Int>
void chaos_kernel(int d, std::int64_t horizon, std::int64_t n_min, const std::vector<double>& inv,
                  std::uint64_t seed, std::size_t begin, std::size_t end, PathExtremes& out) {
    for (std::size_t path = begin; path < end; ++path) {
        PathRng rng(seed, path);
        SignStream signs(rng);
        std::array<Int, kMaxSimDegree + 1> e{};
        e[0] = 1;
        double mx = -kInf;
        double ma = -kInf;
        for (std::int64_t n = 1; n <= horizon; ++n) {
            const int s = signs.next();
            if (s > 0) {
                for (int j = d; j >= 1; --j) e[j] += e[j - 1];
            } else {
                for (int j = d; j >= 1; --j) e[j] -= e[j - 1];
            }
            if (n >= n_min) {
                const double x = static_cast<double>(e[d]) * inv[static_cast<std::size_t>(n)];
                mx = std::max(mx, x);
                ma = std::max(ma, std::abs(x));
            }
        }
        out.signed_max[path] = mx;
        out.abs_max[path] = ma;
    }
}

void walk_kernel(std::int64_t horizon, std::int64_t n_min, const std::vector<double>& inv, std::uint64_t seed,
                 std::size_t begin, std::size_t end, PathExtremes& out) {
    for (std::size_t path = begin; path < end; ++path) {
        PathRng rng(seed, path);
        SignStream signs(rng);
        std::int64_t s = 0;
        double mx = -kInf;
        double ma = -kInf;
        for (std::int64_t n = 1; n <= horizon; ++n) {
            s += signs.next();
            if (n >= n_min) {
                const double x = static_cast<double>(s) * inv[static_cast<std::size_t>(n)];
                mx = std::max(mx, x);
                ma = std::max(ma, std::abs(x));
            }
        }
        out.signed_max[path] = mx;
        out.abs_max[path] = ma;
    }
}

void weighted_kernel(const MartingaleModel& model, std::int64_t horizon, std::int64_t n_min,
                     const std::vector<double>& inv, std::uint64_t seed, std::size_t begin, std::size_t end,
                     PathExtremes& out) {
    const bool rademacher = model.rademacher();
    const double r = model.weibull_r();
    for (std::size_t path = begin; path < end; ++path) {
        PathRng rng(seed, path);
        SignStream signs(rng);
        ModelState state = model.initial_state();
        double mx = -kInf;
        double ma = -kInf;
        for (std::int64_t n = 1; n <= horizon; ++n) {
            double noise = 0.0;
            if (rademacher) {
                noise = signs.next();
            } else {
                const std::uint64_t word = rng.next();
                const double uniform = static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
                noise = weibull_unit_noise(r, uniform, (word & 1U) != 0);
            }
            model.step(state, noise);
            if (n >= n_min) {
                const double x = model.read_S(state) * inv[static_cast<std::size_t>(n)];
                mx = std::max(mx, x);
                ma = std::max(ma, std::abs(x));
            }
        }
        out.signed_max[path] = mx;
        out.abs_max[path] = ma;
    }
}

/// Counts of values strictly above each u.
std::vector<std::uint64_t> exceedances(std::vector<double> values, std::span<const double> u_grid) {
    std::sort(values.begin(), values.end());
    std::vector<std::uint64_t> out;
    out.reserve(u_grid.size());
    for (double u : u_grid) {
        const auto it = std::upper_bound(values.begin(), values.end(), u);
        out.push_back(static_cast<std::uint64_t>(values.end() - it));
    }
    return out;
}

void fill_probabilities(TailEstimate& est) {
    const std::size_t n = est.u_grid.size();
    est.w_hat.resize(n);
    est.w_plus_hat.resize(n);
    est.ci_low.resize(n);
    est.ci_high.resize(n);
    est.ci_plus_low.resize(n);
    est.ci_plus_high.resize(n);
    const double total = static_cast<double>(est.paths);
    for (std::size_t i = 0; i < n; ++i) {
        est.w_hat[i] = static_cast<double>(est.count[i]) / total;
        est.w_plus_hat[i] = static_cast<double>(est.count_plus[i]) / total;
        if (est.exact) {
            est.ci_low[i] = est.ci_high[i] = est.w_hat[i];
            est.ci_plus_low[i] = est.ci_plus_high[i] = est.w_plus_hat[i];
        } else {
            const Interval ci = wilson_interval(est.count[i], est.paths);
            const Interval ci_plus = wilson_interval(est.count_plus[i], est.paths);
            est.ci_low[i] = ci.low;
            est.ci_high[i] = ci.high;
            est.ci_plus_low[i] = ci_plus.low;
            est.ci_plus_high[i] = ci_plus.high;
        }
    }
}

void check_horizon(const MartingaleModel& model, std::int64_t horizon) {
    if (horizon < model.first_index()) {
        std::ostringstream msg;
        msg << "horizon " << horizon << " is below the first non-degenerate index " << model.first_index() << " of "
            << model.label();
        throw DegenerateSigmaError(msg.str());
    }
}

}  // namespace

bool TailEstimate::all_censored() const {
    return std::all_of(count.begin(), count.end(), [](std::uint64_t c) { return c < kCensorCount; });
}

TailEstimate empirical_sup_tail(const MartingaleModel& model, const NormingSequence& v, std::int64_t horizon,
                                std::uint64_t paths, std::span<const double> u_grid, std::uint64_t seed,
                                const SimulationOptions& options) {
    check_horizon(model, horizon);
    if (paths < 1000) throw SizeError("empirical tails need at least 1000 paths");
    if (model.kind() == MartingaleModel::Kind::chaos && model.degree() > kMaxSimDegree)
        throw DomainError("simulation supports chaos degree <= " + std::to_string(kMaxSimDegree));
    const std::int64_t n_min = model.first_index();
    const std::vector<double> inv = inverse_norming(model, v, n_min, horizon);

    PathExtremes extremes{std::vector<double>(paths), std::vector<double>(paths)};
    const unsigned workers = resolve_workers(options.workers);
    parallel_for_chunks(paths, workers, [&](std::size_t begin, std::size_t end) {
        if (model.kind() == MartingaleModel::Kind::weighted_iid) {
            weighted_kernel(model, horizon, n_min, inv, seed, begin, end, extremes);
        } else if (model.degree() == 1) {
            walk_kernel(horizon, n_min, inv, seed, begin, end, extremes);
        } else if (chaos_fits_int64(model.degree(), horizon)) {
            chaos_kernel<std::int64_t>(model.degree(), horizon, n_min, inv, seed, begin, end, extremes);
        } else {
            chaos_kernel<int128>(model.degree(), horizon, n_min, inv, seed, begin, end, extremes);
        }
    });

    TailEstimate est;
    est.u_grid.assign(u_grid.begin(), u_grid.end());
    est.count = exceedances(std::move(extremes.signed_max), u_grid);
    est.count_plus = exceedances(std::move(extremes.abs_max), u_grid);
    est.horizon = horizon;
    est.n_min = n_min;
    est.paths = paths;
    est.seed = seed;
    est.model_id = model.label();
    est.norming_id = v.label();
    fill_probabilities(est);
    return est;
}

TailEstimate exact_sup_tail_small(const MartingaleModel& model, const NormingSequence& v, std::int64_t horizon,
                                  std::span<const double> u_grid) {
    if (horizon > 20) throw SizeError("exact enumeration supports horizon <= 20");
    check_horizon(model, horizon);
    if (!model.rademacher()) throw DomainError("exact enumeration needs Rademacher noise");
    const std::int64_t n_min = model.first_index();
    const std::vector<double> inv = inverse_norming(model, v, n_min, horizon);

    std::vector<double> signed_max;
    std::vector<double> abs_max;
    signed_max.reserve(std::size_t{1} << horizon);
    abs_max.reserve(std::size_t{1} << horizon);
    std::function<void(std::int64_t, const ModelState&, double, double)> visit =
        [&](std::int64_t n, const ModelState& state, double mx, double ma) {
            if (n == horizon) {
                signed_max.push_back(mx);
                abs_max.push_back(ma);
                return;
            }
            for (double sign : {-1.0, 1.0}) {
                ModelState next = state;
                model.step(next, sign);
                double nmx = mx;
                double nma = ma;
                if (n + 1 >= n_min) {
                    const double x = model.read_S(next) * inv[static_cast<std::size_t>(n + 1)];
                    nmx = std::max(nmx, x);
                    nma = std::max(nma, std::abs(x));
                }
                visit(n + 1, next, nmx, nma);
            }
        };
    visit(0, model.initial_state(), -kInf, -kInf);

    TailEstimate est;
    est.u_grid.assign(u_grid.begin(), u_grid.end());
    est.count = exceedances(std::move(signed_max), u_grid);
    est.count_plus = exceedances(std::move(abs_max), u_grid);
    est.horizon = horizon;
    est.n_min = n_min;
    est.paths = std::uint64_t{1} << horizon;
    est.model_id = model.label();
    est.norming_id = v.label();
    est.exact = true;
    fill_probabilities(est);
    return est;
}

std::vector<double> default_u_grid() { return log_spaced(1.0, 8.0, 16); }

bool dominates(const TailEstimate& estimate, const BoundProblem& problem, double C, const BoundOptions& options,
               std::vector<double>* bounds) {
    const BoundReport report = theorem_bound(problem, estimate.u_grid, C, options);
    bool ok = true;
    for (std::size_t i = 0; i < report.points.size(); ++i)
        if (!(report.points[i].bound >= estimate.ci_high[i])) ok = false;
    if (bounds) *bounds = report.bounds();
    return ok;
}

CalibrationResult calibrate_C(const TailEstimate& estimate, const BoundProblem& problem,
                              const CalibrationOptions& options) {
    if (estimate.u_grid.empty()) throw DomainError("calibration needs a nonempty u grid");
    if (!(options.C_low > 0.0 && options.C_high > options.C_low))
        throw DomainError("calibration bracket must satisfy 0 < C_low < C_high");
    CalibrationResult result;
    result.u_grid = estimate.u_grid;
    result.ci_high = estimate.ci_high;

    std::vector<double> bounds;
    ++result.evaluations;
    if (!dominates(estimate, problem, options.C_low, options.bound, &bounds)) {
        std::ostringstream msg;
        msg << "no dominating C: the bound fails already at C = " << options.C_low;
        throw CalibrationError(msg.str());
    }
    std::vector<double> best_bounds = bounds;
    ++result.evaluations;
    if (dominates(estimate, problem, options.C_high, options.bound, &bounds)) {
        std::ostringstream msg;
        msg << "dominance persists at C = " << options.C_high << "; the bracket does not contain the boundary";
        throw CalibrationError(msg.str());
    }
    double lo = std::log(options.C_low);
    double hi = std::log(options.C_high);
    const double stop = std::log1p(options.relative_precision);
    while (hi - lo > stop) {
        const double mid = 0.5 * (lo + hi);
        ++result.evaluations;
        if (dominates(estimate, problem, std::exp(mid), options.bound, &bounds)) {
            lo = mid;
            best_bounds = bounds;
        } else {
            hi = mid;
        }
    }
    result.C_hat = std::exp(lo);
    result.bound_at_C_hat = best_bounds;
    result.margin = kInf;
    for (std::size_t i = 0; i < best_bounds.size(); ++i) {
        const double ratio = estimate.ci_high[i] > 0.0 ? best_bounds[i] / estimate.ci_high[i] : kInf;
        result.margin = std::min(result.margin, ratio);
    }
    return result;
}

DoobReport doob_moment_check(const MartingaleModel& model, std::int64_t horizon) {
    if (horizon > 20) throw SizeError("Doob check enumerates 2^N paths; N <= 20");
    check_horizon(model, horizon);
    if (!model.rademacher()) throw DomainError("Doob check needs Rademacher noise");
    double sum_max = 0.0;
    double sum_final = 0.0;
    std::function<void(std::int64_t, const ModelState&, double)> visit = [&](std::int64_t n, const ModelState& state,
                                                                             double mx) {
        if (n == horizon) {
            const double s = model.read_S(state);
            sum_max += mx;
            sum_final += s * s;
            return;
        }
        for (double sign : {-1.0, 1.0}) {
            ModelState next = state;
            model.step(next, sign);
            const double s = model.read_S(next);
            visit(n + 1, next, std::max(mx, s * s));
        }
    };
    visit(0, model.initial_state(), 0.0);
    if (sum_final == 0.0) throw DomainError("Doob check needs a non-trivial martingale (E S(N)^2 > 0)");

    DoobReport report;
    const double total = std::ldexp(1.0, static_cast<int>(horizon));
    report.horizon = horizon;
    report.e_max_sq = sum_max / total;
    report.e_final_sq = sum_final / total;
    report.ratio = sum_max / sum_final;
    report.holds = sum_max <= report.doob_constant * sum_final;
    return report;
}

LilSummary lil_trajectory_stats(int degree, std::int64_t horizon, std::uint64_t paths, std::uint64_t seed,
                                std::vector<std::int64_t> checkpoints, const SimulationOptions& options) {
    if (degree < 1 || degree > 3) throw DomainError("trajectory statistics support d in {1, 2, 3}");
    if (horizon < 2) throw DomainError("trajectory statistics need N >= 2");
    if (paths < 1) throw SizeError("trajectory statistics need at least one path");
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    for (std::int64_t c : checkpoints)
        if (c < 1 || c > horizon) throw DomainError("checkpoints must lie in [1, N]");
    if (checkpoints.empty() || checkpoints.back() != horizon) checkpoints.push_back(horizon);

    std::vector<double> scale(static_cast<std::size_t>(horizon) + 1);
    for (std::int64_t n = 1; n <= horizon; ++n) {
        const double nn = static_cast<double>(n);
        scale[static_cast<std::size_t>(n)] = 1.0 / std::pow(nn * std::log(std::log(nn + 3.0)), degree / 2.0);
    }
    const std::size_t nc = checkpoints.size();
    std::vector<double> values(paths * nc);
    parallel_for_chunks(paths, resolve_workers(options.workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t path = begin; path < end; ++path) {
            PathRng rng(seed, path);
            SignStream signs(rng);
            std::array<std::int64_t, 4> e{1, 0, 0, 0};
            double best = -kInf;
            std::size_t next_cp = 0;
            for (std::int64_t n = 1; n <= horizon; ++n) {
                const int s = signs.next();
                for (int j = degree; j >= 1; --j) e[j] += s * e[j - 1];
                best = std::max(best, static_cast<double>(e[degree]) * scale[static_cast<std::size_t>(n)]);
                if (n == checkpoints[next_cp]) values[path * nc + next_cp++] = best;
            }
        }
    });

    LilSummary summary;
    summary.degree = degree;
    summary.horizon = horizon;
    summary.paths = paths;
    summary.seed = seed;
    summary.reference_constant = std::pow(2.0, degree / 2.0) / std::tgamma(degree + 1.0);
    summary.checkpoints = checkpoints;
    for (std::size_t c = 0; c < nc; ++c) {
        std::vector<double> column(paths);
        for (std::size_t p = 0; p < paths; ++p) column[p] = values[p * nc + c];
        summary.checkpoint_medians.push_back(quantile(column, 0.5));
        if (c + 1 == nc) {
            summary.median = summary.checkpoint_medians.back();
            summary.lower_quartile = quantile(column, 0.25);
            summary.upper_quartile = quantile(column, 0.75);
            const auto positive = std::count_if(column.begin(), column.end(), [](double x) { return x > 0.0; });
            summary.fraction_positive = static_cast<double>(positive) / static_cast<double>(paths);
        }
    }
    return summary;
}

HartmanWintnerSummary hartman_wintner_probe(std::int64_t horizon, std::uint64_t paths, std::uint64_t seed,
                                            std::int64_t n_start, const SimulationOptions& options) {
    if (horizon < 2) throw DomainError("probe needs N >= 2");
    if (paths < 1) throw SizeError("probe needs at least one path");
    if (n_start == 0) n_start = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::sqrt(static_cast<double>(horizon))));
    if (n_start < 1 || n_start > horizon) throw DomainError("probe start must lie in [1, N]");

    std::vector<double> probe(paths);
    std::vector<char> square_ok(paths, 1);
    parallel_for_chunks(paths, resolve_workers(options.workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t path = begin; path < end; ++path) {
            PathRng rng(seed, path);
            SignStream signs(rng);
            std::int64_t sum1 = 0;
            std::int64_t sum2 = 0;
            double best = -kInf;
            for (std::int64_t n = 1; n <= horizon; ++n) {
                const int s = signs.next();
                sum1 += s;
                sum2 += s * s;
                if (sum2 != n) square_ok[path] = 0;
                if (n >= n_start) {
                    const double nn = static_cast<double>(n);
                    const double value = static_cast<double>(sum1 * sum1) / (nn * std::log(std::log(nn + 3.0)));
                    best = std::max(best, value);
                }
            }
            probe[path] = best;
        }
    });

    HartmanWintnerSummary summary;
    summary.horizon = horizon;
    summary.n_start = n_start;
    summary.paths = paths;
    summary.seed = seed;
    summary.square_sum_equals_n = std::all_of(square_ok.begin(), square_ok.end(), [](char c) { return c != 0; });
    summary.all_positive = std::all_of(probe.begin(), probe.end(), [](double x) { return x > 0.0; });
    summary.median = quantile(probe, 0.5);
    summary.lower_quartile = quantile(probe, 0.25);
    summary.upper_quartile = quantile(probe, 0.75);
    return summary;
}

}  // namespace lilbound
