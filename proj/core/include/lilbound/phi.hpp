#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lilbound {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * A member of the class Phi: an even, strictly convex function with
 * phi(0) = 0 whose ratio phi(lambda)/lambda grows without bound as lambda
 * approaches lambda0 (which may be +infinity).
 *
 * The callable is evaluated as given, so user-supplied functions that are not
 * even or do not vanish at zero are representable and can be diagnosed with
 * validate_phi(). Outside (-lambda0, lambda0) evaluation returns +infinity.
 *
 * Built-in families also carry closed forms for the Young-Fenchel conjugate
 * and for the inverse on the positive branch; the numeric solvers are used
 * whenever these are absent.
 */
class PhiFunction {
public:
    using Fn = std::function<double(double)>;

    struct ClosedForms {
        std::optional<Fn> conjugate;
        std::optional<Fn> inverse;
        /// Exponent q of the power family |lambda|^q / q.
        std::optional<double> power_exponent;
    };

    PhiFunction(std::string label, Fn evaluate, double lambda0 = kInf,
                ClosedForms closed_forms = {});

    double operator()(double lambda) const;

    const std::string& label() const noexcept { return label_; }
    double lambda0() const noexcept { return lambda0_; }
    bool finite_domain() const noexcept { return lambda0_ < kInf; }

    /// Largest lambda the solvers probe: lambda0 * (1 - 1e-12), or +inf.
    double search_limit() const noexcept;

    bool has_analytic_conjugate() const noexcept { return closed_.conjugate.has_value(); }
    double analytic_conjugate(double u) const { return (*closed_.conjugate)(u); }
    bool has_analytic_inverse() const noexcept { return closed_.inverse.has_value(); }
    double analytic_inverse(double p) const { return (*closed_.inverse)(p); }
    std::optional<double> power_exponent() const noexcept { return closed_.power_exponent; }

private:
    std::string label_;
    Fn evaluate_;
    double lambda0_;
    ClosedForms closed_;
};

// Built-in families.
PhiFunction power_phi(double q);   // |lambda|^q / q, q > 1
PhiFunction phi2();                // 0.5 * lambda^2
PhiFunction cosh_phi();            // cosh(lambda) - 1
PhiFunction subexponential_phi();  // -log(1 - lambda^2), lambda0 = 1

/**
 * Table-backed phi from samples (lambda_i, phi_i), lambda_0 = 0, strictly
 * increasing lambda and convex data. Between knots the interpolant is a
 * C1 convex quadratic spline (one extra knot per interval), reflected to
 * negative arguments. The last abscissa is treated as an open endpoint
 * lambda0.
 */
PhiFunction table_phi(std::span<const double> lambdas, std::span<const double> values,
                      std::string label = "table");

/// Two-column CSV (lambda, phi) with a header row.
PhiFunction load_table_phi(const std::filesystem::path& path);

/// Central difference of phi kept inside the open domain.
double numeric_derivative(const PhiFunction& phi, double lambda);

struct ConjugateOptions {
    double tolerance = 1e-10;
    int max_iterations = 200;
    bool use_analytic = true;
};

struct ConjugateResult {
    double value = 0.0;
    double argmax = 0.0;
    /// Upper bound on sup - value from the final bracket.
    double residual = 0.0;
    bool at_boundary = false;
};

ConjugateResult conjugate_detailed(const PhiFunction& phi, double u,
                                   const ConjugateOptions& options = {});

/// phi*(u) = sup_{lambda >= 0} (lambda u - phi(lambda)), u >= 0.
double conjugate(const PhiFunction& phi, double u);

/// Same, ignoring any closed form.
double conjugate_numeric(const PhiFunction& phi, double u);

struct ConjugateGrid {
    std::vector<double> u_values;
    std::vector<double> phi_star_values;
    double max_residual = 0.0;
};

ConjugateGrid conjugate_grid(const PhiFunction& phi, std::span<const double> u_values,
                             const ConjugateOptions& options = {});

/// phi* packaged as a PhiFunction (lambda0 = inf), for double conjugation.
PhiFunction fenchel_conjugate(const PhiFunction& phi, bool numeric = true);

/// Unique lambda in [0, lambda0) with phi(lambda) = p.
double phi_inverse(const PhiFunction& phi, double p);
double phi_inverse_numeric(const PhiFunction& phi, double p);

/// psi(p) = p / phi^{-1}(p), p >= 2.
double psi(const PhiFunction& phi, double p);

struct InvariantCheck {
    std::string name;
    bool passed = true;
    double worst_lambda = 0.0;
    /// Smallest margin seen (negative or zero when the check fails).
    double worst_margin = 0.0;
};

struct PhiDiagnostics {
    std::string label;
    std::vector<InvariantCheck> checks;

    bool all_passed() const;
    const InvariantCheck& check(const std::string& name) const;
};

/// 512 log-spaced points on [1e-6, min(search_limit, 50)].
std::vector<double> invariant_grid(const PhiFunction& phi);

PhiDiagnostics validate_phi(const PhiFunction& phi);

std::vector<double> log_spaced(double lo, double hi, std::size_t count);
std::vector<double> lin_spaced(double lo, double hi, std::size_t count);

}  // namespace lilbound
