#pragma once

// Reference values on the unit disc.  Everything here runs on Boost.Math
// quadrature so that no kernel is shared with the analytic, spectral or BEM
// routes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "errors.hpp"

namespace ellipstat {

enum class OracleMethod { semi_analytic, nested_quadrature };

inline std::string_view to_string(OracleMethod m) noexcept
{
    return m == OracleMethod::semi_analytic ? "semi_analytic" : "nested_quadrature";
}

struct OracleResult
{
    double value = 0.0;
    OracleMethod method = OracleMethod::semi_analytic;
    double estimated_error = 0.0;
};

namespace oracle_detail {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

constexpr double eps = std::numeric_limits<double>::epsilon();

template <class F>
double kronrod(F&& f, double a, double b, double* err = nullptr)
{
    double e = 0.0;
    const double v = gauss_kronrod<double, 61>::integrate(f, a, b, 30, 1e-14, &e);
    if (err)
        *err = e;
    return v;
}

// A rule object must not be re-entered, so nested levels each own one.
template <class F>
double tanh_sinh_integral(tanh_sinh<double>& rule, F&& f, double a, double b)
{
    // The abscissa tables break down on very short intervals.
    if (b - a < 1e-6)
        return gauss<double, 20>::integrate(f, a, b);
    return rule.integrate(f, a, b, 1e-13);
}

}  // namespace oracle_detail

/// int_rho^1 r / sqrt(r^2 - t^2) dr, for t <= rho <= 1.
inline double i_c_inner(double rho, double t)
{
    return std::sqrt((1.0 - t) * (1.0 + t)) - std::sqrt((rho - t) * (rho + t));
}

/// t^2 int_t^1 rho / sqrt(rho^2 - t^2) * i_c_inner(rho, t) drho, doubled;
/// the rho-integral is (1 - t^2)/2.
inline double i_c_reduced_integrand(double t) { return t * t * (1.0 - t) * (1.0 + t); }

inline OracleResult i_c_semianalytic()
{
    double err = 0.0;
    const double v = oracle_detail::kronrod(i_c_reduced_integrand, 0.0, 1.0, &err);
    return {v, OracleMethod::semi_analytic, err + 4.0 * oracle_detail::eps * std::abs(v)};
}

/// int_0^{min(rho, r)} t^2 / (sqrt(rho^2 - t^2) sqrt(r^2 - t^2)) dt with
/// t = min sin(u).
inline double copson_t_integral(double rho, double r)
{
    const double m = std::min(rho, r);
    const double big = std::max(rho, r);
    auto f = [&](double u) {
        const double s = m * std::sin(u);
        return s * s / std::sqrt((big - s) * (big + s));
    };
    return oracle_detail::kronrod(f, 0.0, 0.5 * std::numbers::pi);
}

/// copson_t_integral in closed form, (m^2/M) (K(k) - E(k)) / k^2 with k = m/M.
inline double copson_t_closed(double rho, double r)
{
    const double m = std::min(rho, r);
    const double big = std::max(rho, r);
    // k rounds to 1 only within an ulp of the integrable log singularity.
    const double k = std::min(m / big, std::nextafter(1.0, 0.0));
    if (k == 0.0)
        return 0.0;
    return big * (boost::math::ellint_1(k) - boost::math::ellint_2(k));
}

/// The t-integral taken innermost: 2 int_0^1 r int_0^r rho J(rho, r) drho dr.
inline double i_c_ordered_numeric()
{
    using oracle_detail::tanh_sinh_integral;
    boost::math::quadrature::tanh_sinh<double> outer_rule, inner_rule;
    auto outer = [&](double r) {
        auto middle = [r](double rho) { return rho * copson_t_closed(rho, r); };
        return r * tanh_sinh_integral(inner_rule, middle, 0.0, r);
    };
    return 2.0 * tanh_sinh_integral(outer_rule, outer, 0.0, 1.0);
}

/// Same integrand over the full square 0 <= rho, r <= 1.
inline double i_c_symmetric_numeric()
{
    using oracle_detail::tanh_sinh_integral;
    boost::math::quadrature::tanh_sinh<double> outer_rule, inner_rule;
    auto outer = [&](double r) {
        auto middle = [r](double rho) { return rho * copson_t_closed(rho, r); };
        const double below = tanh_sinh_integral(inner_rule, middle, 0.0, r);
        const double above = r < 1.0 ? tanh_sinh_integral(inner_rule, middle, r, 1.0) : 0.0;
        return r * (below + above);
    };
    return tanh_sinh_integral(outer_rule, outer, 0.0, 1.0);
}

/// |LHS - RHS| of
///   int_0^{2pi} cos(phi) / sqrt(rho^2 + r^2 - 2 r rho cos(phi - phi'))
///     = (4 cos(phi') / (rho r)) int_0^{min} t^2 / (sqrt(rho^2 - t^2) sqrt(r^2 - t^2)) dt.
/// At rho == r both sides diverge logarithmically unless cos(phi') = 0.
inline double copson_identity_check(double rho, double r, double phi_prime)
{
    if (!(rho > 0.0 && rho <= 1.0 && r > 0.0 && r <= 1.0))
        throw DomainError("radii must lie in (0, 1]");
    if (rho == r)
        throw DomainError("coincident radii: both sides of the identity diverge");

    // Periodic integrand; split where the kernel peaks.
    auto lhs_f = [&](double psi) {
        const double phi = phi_prime + psi;
        const double d2 = (rho - r) * (rho - r) + 4.0 * rho * r * std::pow(std::sin(0.5 * psi), 2);
        return std::cos(phi) / std::sqrt(d2);
    };
    const double lhs =
        oracle_detail::kronrod(lhs_f, -std::numbers::pi, 0.0) + oracle_detail::kronrod(lhs_f, 0.0, std::numbers::pi);

    const double rhs = 4.0 * std::cos(phi_prime) / (rho * r) * copson_t_integral(rho, r);
    return std::abs(lhs - rhs);
}

namespace oracle_detail {

// Composite Gauss on [0, 1] with breakpoints 1 - ratio^k, graded toward 1.
template <class F>
double graded_toward_one(F&& f, int panels, double ratio)
{
    std::vector<double> cuts{0.0};
    for (int k = 1; k < panels; ++k)
        cuts.push_back(1.0 - std::pow(ratio, k));
    cuts.push_back(1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        sum += gauss<double, 20>::integrate(f, cuts[i], cuts[i + 1]);
    return sum;
}

inline double disc_self_energy(double radius, int panels)
{
    constexpr double ratio = 0.15;
    const double pi = std::numbers::pi;
    // (1/4pi) int int dx dy / |x - y| over the disc, in polar coordinates
    // with psi the azimuthal difference and rho = r s <= r (doubled).
    auto over_r = [&](double r) {
        auto over_s = [&](double s) {
            // psi in [0, pi], graded toward psi = 0 where s -> 1 is singular.
            auto over_psi = [&](double x) {
                const double psi = pi * (1.0 - x);
                const double d2 = (1.0 - s) * (1.0 - s) + 4.0 * s * std::pow(std::sin(0.5 * psi), 2);
                return pi / std::sqrt(d2);
            };
            return s * 2.0 * graded_toward_one(over_psi, panels, ratio);
        };
        // rho dr drho / |x - y| with rho = r s contributes r^2 s / (r |...|).
        return r * r * graded_toward_one(over_s, panels, ratio);
    };
    const double angular = 2.0 * pi;  // the free azimuth
    const double raw = gauss<double, 20>::integrate(over_r, 0.0, radius);
    return 2.0 * angular * raw / (4.0 * pi);
}

}  // namespace oracle_detail

/// Constant-density energy of a disc of the given radius; exact value 4R^3/3.
/// The error estimate is the change from panels - 1 to panels; the graded
/// rule gains roughly a constant factor per panel.
inline OracleResult i_sigma0_circle_quadrature(double radius = 1.0, int panels = 14)
{
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw DomainError("radius must be positive");
    if (panels < 2)
        throw ConfigurationError("at least two panels required");
    const double fine = oracle_detail::disc_self_energy(radius, panels);
    const double coarse = oracle_detail::disc_self_energy(radius, panels - 1);
    return {fine, OracleMethod::nested_quadrature, std::abs(fine - coarse) + 64.0 * oracle_detail::eps * std::abs(fine)};
}

}  // namespace ellipstat
