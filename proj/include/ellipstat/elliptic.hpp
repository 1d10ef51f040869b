#pragma once

// Complete elliptic integrals of the first and second kind.
//
// NOTE: every function takes the MODULUS eps, as in
//   K(eps) = int_0^{pi/2} (1 - eps^2 sin^2 phi)^{-1/2} dphi,
// not the parameter m = eps^2.  Boost.Math and std::comp_ellint_1 use the
// modulus as well; mpmath and Abramowitz-Stegun use the parameter.

#include <cmath>
#include <limits>
#include <numbers>

#include "errors.hpp"

namespace ellipstat {

/// Arithmetic-geometric mean of two positive numbers.
inline double agm(double x, double y)
{
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
        throw DomainError("agm requires positive finite arguments");
    constexpr double tol = 4.0 * std::numeric_limits<double>::epsilon();
    for (int i = 0; i < 64; ++i) {
        if (std::abs(x - y) <= tol * x)
            break;
        const double next = 0.5 * (x + y);
        y = std::sqrt(x * y);
        x = next;
    }
    return x;
}

namespace detail {

// Runs the AGM on (1, sqrt(1 - eps^2)) and returns K together with
// S = sum_{n>=1} 2^{n-1} c_n^2 / eps^2, so that (K - E)/eps^2 = K (1/2 + S).
// c_{n+1} = c_n^2 / (4 a_{n+1}) avoids the cancellation in (a_n - b_n)/2.
struct AgmState
{
    double k;
    double tail_over_m;
};

inline AgmState agm_state(double eps)
{
    double a = 1.0;
    double b = std::sqrt((1.0 - eps) * (1.0 + eps));
    double c_over_eps = 1.0;  // c_0 / eps
    double c = eps;
    double pow2 = 0.5;        // 2^{n-1} for n = 1 after the first step
    double tail = 0.0;
    constexpr double tol = 4.0 * std::numeric_limits<double>::epsilon();
    for (int i = 0; i < 64; ++i) {
        if (std::abs(a - b) <= tol * a && c <= tol * a)
            break;
        const double a_next = 0.5 * (a + b);
        const double b_next = std::sqrt(a * b);
        // c_{n+1}/eps = (c_n/eps) * c_n / (4 a_{n+1})
        c_over_eps = c_over_eps * c / (4.0 * a_next);
        c = c_over_eps * eps;
        pow2 *= 2.0;
        tail += pow2 * c_over_eps * c_over_eps;
        a = a_next;
        b = b_next;
    }
    return {std::numbers::pi / (2.0 * a), tail};
}

}  // namespace detail

/// K(eps) for 0 <= eps < 1.
inline double complete_K(double eps)
{
    if (!(eps >= 0.0) || !(eps < 1.0))
        throw DomainError("complete_K requires 0 <= eps < 1");
    return std::numbers::pi / (2.0 * agm(1.0, std::sqrt((1.0 - eps) * (1.0 + eps))));
}

/// E(eps) for 0 <= eps <= 1 via the AGM companion series
/// E = K (1 - sum_{n>=0} 2^{n-1} c_n^2).
inline double complete_E(double eps)
{
    if (!(eps >= 0.0) || !(eps <= 1.0))
        throw DomainError("complete_E requires 0 <= eps <= 1");
    if (eps == 1.0)
        return 1.0;
    if (eps == 0.0)
        return std::numbers::pi / 2.0;
    const detail::AgmState s = detail::agm_state(eps);
    const double m = eps * eps;
    // 1 - m/2 - m*tail, grouped to keep accuracy for small m
    return s.k * (1.0 - m * (0.5 + s.tail_over_m));
}

/// Below this value of eps^2, (K - E)/eps^2 is summed from its Maclaurin series.
inline constexpr double k_minus_e_series_threshold = 1e-4;

/// (K(eps) - E(eps)) / eps^2 without cancellation; equals pi/4 at eps = 0.
inline double k_minus_e_over_eps2(double eps)
{
    if (!(eps >= 0.0) || !(eps < 1.0))
        throw DomainError("k_minus_e_over_eps2 requires 0 <= eps < 1");
    const double m = eps * eps;
    if (m < k_minus_e_series_threshold) {
        // (pi/2) sum_{n>=1} t_n^2 (2n/(2n-1)) m^{n-1},  t_n = (2n-1)!!/(2n)!!
        double t = 0.5;
        double mp = 1.0;
        double sum = 0.0;
        for (int n = 1; n < 40; ++n) {
            const double term = t * t * (2.0 * n / (2.0 * n - 1.0)) * mp;
            sum += term;
            if (term < 1e-18 * sum)
                break;
            t *= (2.0 * n + 1.0) / (2.0 * n + 2.0);
            mp *= m;
        }
        return 0.5 * std::numbers::pi * sum;
    }
    const detail::AgmState s = detail::agm_state(eps);
    return s.k * (0.5 + s.tail_over_m);
}

struct EllipticPair
{
    double k_value;
    double e_value;
    double modulus;
};

inline EllipticPair elliptic_pair(double eps)
{
    return {complete_K(eps), complete_E(eps), eps};
}

}  // namespace ellipstat
