#pragma once

// Gauss-Legendre rules, adaptive Gauss-Kronrod integration and compensated
// summation shared by the analytic, spectral and boundary-element routes.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ellipstat {

/// Neumaier variant of Kahan summation.
class KahanSum
{
public:
    KahanSum& operator+=(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
inline QuadratureRule gauss_legendre(std::size_t n)
{
    if (n == 0)
        throw ConfigurationError("Gauss-Legendre rule needs at least one node");

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess for the i-th largest root
        double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
                p0 = p1;
                p1 = pk;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // recompute the derivative at the converged root
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
            p0 = p1;
            p1 = pk;
        }
        dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);

        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[n - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

/// n-point Gauss-Legendre rule mapped to [a, b].
inline QuadratureRule gauss_legendre(std::size_t n, double a, double b)
{
    QuadratureRule rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

struct IntegrationResult
{
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

// Kronrod 15-point extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kronrod15_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod15_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss7_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
IntegrationResult gauss_kronrod15(F& f, double a, double b)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(mid);
    double kronrod = fc * kronrod15_weights[7];
    double gauss = fc * gauss7_weights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod15_nodes[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += kronrod15_weights[j] * fsum;
        if (j % 2 == 1)
            gauss += gauss7_weights[j / 2] * fsum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
IntegrationResult adaptive_recurse(F& f, double a, double b, double tol, int depth)
{
    const IntegrationResult whole = gauss_kronrod15(f, a, b);
    if (whole.error <= tol || whole.error <= 1e-15 * std::abs(whole.value))
        return whole;
    if (depth == 0)
        throw ConvergenceError("adaptive quadrature did not reach its tolerance");
    const double mid = 0.5 * (a + b);
    const IntegrationResult left = adaptive_recurse(f, a, mid, 0.5 * tol, depth - 1);
    const IntegrationResult right = adaptive_recurse(f, mid, b, 0.5 * tol, depth - 1);
    return {left.value + right.value, left.error + right.error};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] by recursive
/// bisection.  The evaluation order is fixed, so results are reproducible.
/// Throws ConvergenceError when max_depth bisections do not suffice.
template <class F>
IntegrationResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-13, int max_depth = 40)
{
    return detail::adaptive_recurse(f, a, b, abs_tol, max_depth);
}

/// Tensor product of a 1D rule on [0, 1] collapsed onto the reference
/// triangle {u, v >= 0, u + v <= 1}.  Weights sum to 1/2.
struct TrianglePoint
{
    double u;
    double v;
    double w;
};

inline std::vector<TrianglePoint> collapsed_gauss_triangle(std::size_t order)
{
    const QuadratureRule r = gauss_legendre(order, 0.0, 1.0);
    std::vector<TrianglePoint> pts;
    pts.reserve(order * order);
    for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = 0; j < order; ++j) {
            const double xi = r.nodes[i];
            const double eta = r.nodes[j];
            pts.push_back({xi * (1.0 - eta), xi * eta, r.weights[i] * r.weights[j] * xi});
        }
    return pts;
}

}  // namespace ellipstat
