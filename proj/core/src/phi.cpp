#include "lilbound/phi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "lilbound/errors.hpp"
#include "lilbound/io.hpp"

namespace lilbound {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const double kDiffStep = std::cbrt(kEps);

struct TableSpline {
    std::vector<double> x, y, knot_slope, secant;

    double eval(double lambda) const {
        const double a = std::abs(lambda);
        if (a >= x.back()) return kInf;
        const auto it = std::upper_bound(x.begin(), x.end(), a);
        const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
        const double h = x[i + 1] - x[i];
        const double t = a - x[i];
        const double s = secant[i];
        const double d_lo = s - knot_slope[i];
        const double d_hi = knot_slope[i + 1] - s;
        if (d_lo + d_hi <= 0.0) return y[i] + s * t;
        // Derivative runs linearly d_i -> s on [0, xi] and s -> d_{i+1} on [xi, h].
        const double xi = h * d_hi / (d_lo + d_hi);
        if (t <= xi) {
            const double slope_t = xi > 0.0 ? knot_slope[i] + (s - knot_slope[i]) * t / xi : s;
            return y[i] + 0.5 * (knot_slope[i] + slope_t) * t;
        }
        const double left = 0.5 * (knot_slope[i] + s) * xi;
        const double w = h - xi;
        const double r = t - xi;
        const double slope_t = s + (knot_slope[i + 1] - s) * r / w;
        return y[i] + left + 0.5 * (s + slope_t) * r;
    }
};

double clamp_positive(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

PhiFunction::PhiFunction(std::string label, Fn evaluate, double lambda0, ClosedForms closed_forms)
    : label_(std::move(label)), evaluate_(std::move(evaluate)), lambda0_(lambda0),
      closed_(std::move(closed_forms)) {
    if (!(lambda0_ > 0.0)) throw DomainError("phi '" + label_ + "': lambda0 must be positive");
}

double PhiFunction::operator()(double lambda) const {
    if (finite_domain() && std::abs(lambda) >= lambda0_) return kInf;
    return evaluate_(lambda);
}

double PhiFunction::search_limit() const noexcept {
    return finite_domain() ? lambda0_ * (1.0 - 1e-12) : kInf;
}

PhiFunction power_phi(double q) {
    if (!(q > 1.0)) throw DomainError("power phi requires q > 1");
    const double qc = q / (q - 1.0);
    std::ostringstream label;
    label << "power:q=" << q;
    PhiFunction::ClosedForms forms;
    forms.conjugate = [qc](double u) { return std::pow(std::abs(u), qc) / qc; };
    forms.inverse = [q](double p) { return std::pow(q * p, 1.0 / q); };
    forms.power_exponent = q;
    if (q == 2.0) {
        forms.conjugate = [](double u) { return 0.5 * u * u; };
        forms.inverse = [](double p) { return std::sqrt(2.0 * p); };
        return PhiFunction("phi2", [](double l) { return 0.5 * l * l; }, kInf, std::move(forms));
    }
    return PhiFunction(label.str(), [q](double l) { return std::pow(std::abs(l), q) / q; }, kInf,
                       std::move(forms));
}

PhiFunction phi2() { return power_phi(2.0); }

PhiFunction cosh_phi() {
    PhiFunction::ClosedForms forms;
    forms.conjugate = [](double u) {
        const double a = std::abs(u);
        return a * std::asinh(a) - a * a / (std::hypot(1.0, a) + 1.0);
    };
    forms.inverse = [](double p) { return std::acosh(1.0 + p); };
    // 2 sinh^2(l/2) avoids the cancellation in cosh(l) - 1 near zero.
    return PhiFunction(
        "cosh",
        [](double l) {
            const double s = std::sinh(0.5 * l);
            return 2.0 * s * s;
        },
        kInf, std::move(forms));
}

PhiFunction subexponential_phi() {
    PhiFunction::ClosedForms forms;
    forms.conjugate = [](double u) {
        const double sm1 = u * u / (std::hypot(1.0, u) + 1.0);  // sqrt(1 + u^2) - 1
        return sm1 - std::log1p(0.5 * sm1);
    };
    forms.inverse = [](double p) { return std::sqrt(-std::expm1(-p)); };
    return PhiFunction(
        "subexp", [](double l) { return -std::log1p(-l * l); }, 1.0, std::move(forms));
}

PhiFunction table_phi(std::span<const double> lambdas, std::span<const double> values,
                      std::string label) {
    if (lambdas.size() != values.size()) throw DomainError("phi table: column length mismatch");
    if (lambdas.size() < 3) throw DomainError("phi table: need at least 3 rows");
    if (lambdas.front() != 0.0) throw DomainError("phi table: first lambda must be 0");
    auto spline = std::make_shared<TableSpline>();
    spline->x.assign(lambdas.begin(), lambdas.end());
    spline->y.assign(values.begin(), values.end());
    const std::size_t n = spline->x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(spline->x[i + 1] > spline->x[i]))
            throw DomainError("phi table: lambda must be strictly increasing");
        if (!std::isfinite(spline->y[i]) || !std::isfinite(spline->y[i + 1]))
            throw DomainError("phi table: non-finite value");
        spline->secant.push_back((spline->y[i + 1] - spline->y[i]) / (spline->x[i + 1] - spline->x[i]));
    }
    if (spline->secant.front() < 0.0) throw DomainError("phi table: phi must increase on lambda >= 0");
    for (std::size_t i = 0; i + 1 < spline->secant.size(); ++i) {
        if (spline->secant[i + 1] < spline->secant[i])
            throw DomainError("phi table: data is not convex");
    }
    auto& d = spline->knot_slope;
    d.resize(n);
    d[0] = 0.0;  // even and C1 at the origin
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = 0.5 * (spline->secant[i - 1] + spline->secant[i]);
    d[n - 1] = 2.0 * spline->secant[n - 2] - d[n - 2];
    const double lambda0 = spline->x.back();
    return PhiFunction(
        std::move(label), [spline](double l) { return spline->eval(l); }, lambda0);
}

PhiFunction load_table_phi(const std::filesystem::path& path) {
    const auto columns = read_csv_columns(path, 2);
    return table_phi(columns[0], columns[1], "table:" + path.filename().string());
}

double numeric_derivative(const PhiFunction& phi, double lambda) {
    const double a = std::abs(lambda);
    double scale = std::max(a, 1e-200);
    if (phi.finite_domain()) scale = std::min(scale, 0.5 * (phi.lambda0() - a));
    const double h = kDiffStep * scale;
    return (phi(lambda + h) - phi(lambda - h)) / (2.0 * h);
}

ConjugateResult conjugate_detailed(const PhiFunction& phi, double u, const ConjugateOptions& options) {
    if (!(u >= 0.0)) throw DomainError("conjugate: u must be >= 0");
    ConjugateResult result;
    if (u == 0.0) return result;
    if (options.use_analytic && phi.has_analytic_conjugate()) {
        result.value = phi.analytic_conjugate(u);
        result.argmax = std::nan("");
        return result;
    }

    const auto objective = [&](double l) { return l * u - phi(l); };
    const auto slope_gap = [&](double l) { return u - numeric_derivative(phi, l); };
    const double limit = phi.search_limit();

    // Finite domains are approached by halving the gap to the edge: difference
    // quotients taken at the edge itself underflow to zero.
    const bool finite = phi.finite_domain();
    double lo = 0.0;
    double hi = finite ? std::min(1.0, 0.5 * limit) : 1.0;
    while (slope_gap(hi) > 0.0) {
        if (finite && limit - hi <= 1e-9 * limit) {
            // Maximizer pinned at the domain edge; confirm by golden section.
            const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = lo, b = hi;
            double c = b - inv_phi * (b - a), dd = a + inv_phi * (b - a);
            for (int i = 0; i < options.max_iterations && (b - a) > 4.0 * kEps * b; ++i) {
                if (objective(c) < objective(dd)) {
                    a = c;
                } else {
                    b = dd;
                }
                c = b - inv_phi * (b - a);
                dd = a + inv_phi * (b - a);
            }
            const double best = std::max(objective(limit), objective(0.5 * (a + b)));
            result.value = clamp_positive(best);
            result.argmax = limit;
            result.at_boundary = true;
            result.residual = (b - a) * std::abs(slope_gap(a));
            return result;
        }
        lo = hi;
        hi = finite ? hi + 0.5 * (limit - hi) : 2.0 * hi;
        if (hi > 1e300) throw NonconvergenceError("conjugate: could not bracket maximizer", kInf);
    }

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= 4.0 * kEps * hi) break;
        if (slope_gap(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double arg = 0.5 * (lo + hi);
    result.argmax = arg;
    result.value = clamp_positive(objective(arg));
    result.residual = (hi - lo) * std::max(std::abs(slope_gap(lo)), std::abs(slope_gap(hi)));
    if (iter == options.max_iterations && result.residual > options.tolerance) {
        throw NonconvergenceError("conjugate: tolerance not met within iteration cap", result.residual);
    }
    return result;
}

double conjugate(const PhiFunction& phi, double u) { return conjugate_detailed(phi, u).value; }

double conjugate_numeric(const PhiFunction& phi, double u) {
    ConjugateOptions options;
    options.use_analytic = false;
    return conjugate_detailed(phi, u, options).value;
}

ConjugateGrid conjugate_grid(const PhiFunction& phi, std::span<const double> u_values,
                             const ConjugateOptions& options) {
    ConjugateGrid grid;
    grid.u_values.assign(u_values.begin(), u_values.end());
    grid.phi_star_values.reserve(u_values.size());
    for (std::size_t i = 0; i < u_values.size(); ++i) {
        if (i > 0 && !(u_values[i] > u_values[i - 1]))
            throw DomainError("conjugate grid: u values must be increasing");
        const auto r = conjugate_detailed(phi, u_values[i], options);
        grid.phi_star_values.push_back(r.value);
        grid.max_residual = std::max(grid.max_residual, r.residual);
    }
    return grid;
}

PhiFunction fenchel_conjugate(const PhiFunction& phi, bool numeric) {
    auto base = std::make_shared<PhiFunction>(phi);
    return PhiFunction("(" + phi.label() + ")*", [base, numeric](double u) {
        const double a = std::abs(u);
        return numeric ? conjugate_numeric(*base, a) : conjugate(*base, a);
    });
}

double phi_inverse_numeric(const PhiFunction& phi, double p) {
    if (!(p >= 0.0)) throw DomainError("phi_inverse: p must be >= 0");
    if (p == 0.0) return 0.0;
    const double limit = phi.search_limit();
    double lo = 0.0;
    double hi = std::min(1.0, limit);
    while (phi(hi) < p) {
        if (hi >= limit) {
            std::ostringstream msg;
            msg << "phi_inverse: p = " << p << " exceeds sup of " << phi.label()
                << " on [0, lambda0) (phi near lambda0 = " << phi(limit) << ")";
            throw UnreachableValueError(msg.str());
        }
        lo = hi;
        hi = std::min(2.0 * hi, limit);
        if (hi > 1e300) throw UnreachableValueError("phi_inverse: phi does not reach p");
    }
    // Enough halvings to resolve any normal double from [0, 1].
    for (int iter = 0; iter < 1100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= 2.0 * kEps * hi) break;
        if (phi(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double phi_inverse(const PhiFunction& phi, double p) {
    if (!(p >= 0.0)) throw DomainError("phi_inverse: p must be >= 0");
    if (phi.has_analytic_inverse()) return phi.analytic_inverse(p);
    return phi_inverse_numeric(phi, p);
}

double psi(const PhiFunction& phi, double p) {
    if (!(p >= 2.0)) throw DomainError("psi: p must be >= 2");
    return p / phi_inverse(phi, p);
}

bool PhiDiagnostics::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const InvariantCheck& PhiDiagnostics::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw DomainError("no invariant check named '" + name + "'");
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {lo};
    if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log_spaced: need 0 < lo <= hi");
    std::vector<double> out(count);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> lin_spaced(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {lo};
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.back() = hi;
    return out;
}

std::vector<double> invariant_grid(const PhiFunction& phi) {
    return log_spaced(1e-6, std::min(phi.search_limit(), 50.0), 512);
}

PhiDiagnostics validate_phi(const PhiFunction& phi) {
    PhiDiagnostics report;
    report.label = phi.label();
    const auto grid = invariant_grid(phi);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = phi(grid[i]);

    {
        const double at_zero = phi(0.0);
        const double margin = 1e-12 - std::abs(at_zero);
        report.checks.push_back({"zero_at_origin", margin > 0.0, 0.0, margin});
    }
    {
        InvariantCheck c{"even", true, grid.front(), kInf};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double gap = std::abs(values[i] - phi(-grid[i]));
            const double margin = 1e-12 * std::max(1.0, std::abs(values[i])) - gap;
            if (margin < c.worst_margin) {
                c.worst_margin = margin;
                c.worst_lambda = grid[i];
            }
        }
        c.passed = c.worst_margin >= 0.0;
        report.checks.push_back(c);
    }
    {
        // Secant slopes must strictly increase.
        InvariantCheck c{"strictly_convex", true, grid.front(), kInf};
        double prev_slope = (values[1] - values[0]) / (grid[1] - grid[0]);
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double slope = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
            const double margin = (slope - prev_slope) / std::max(std::abs(slope), 1e-300);
            if (!(margin >= c.worst_margin) || std::isnan(margin)) {
                c.worst_margin = std::isnan(margin) ? -kInf : margin;
                c.worst_lambda = grid[i];
            }
            prev_slope = slope;
        }
        c.passed = c.worst_margin > 0.0;
        report.checks.push_back(c);
    }
    {
        InvariantCheck c{"superlinear", true, grid.front(), kInf};
        double prev_ratio = values[0] / grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double ratio = values[i] / grid[i];
            const double margin = (ratio - prev_ratio) / std::max(std::abs(ratio), 1e-300);
            if (!(margin >= c.worst_margin) || std::isnan(margin)) {
                c.worst_margin = std::isnan(margin) ? -kInf : margin;
                c.worst_lambda = grid[i];
            }
            prev_ratio = ratio;
        }
        c.passed = c.worst_margin > 0.0;
        report.checks.push_back(c);
    }
    return report;
}

}  // namespace lilbound
