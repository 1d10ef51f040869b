#pragma once

// Normalized associated Legendre functions Q_n^m with
//   int_{-1}^{1} Q_n^m(x)^2 dx = 1,
// Condon-Shortley phase (-1)^m included, and Q_n^{-m} = (-1)^m Q_n^m.
// The spectral expansion only uses indices with n - m even.

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace ellipstat {

struct BasisIndex
{
    int n = 0;
    int m = 0;

    bool participates() const noexcept { return std::abs(m) <= n && (n - m) % 2 == 0; }
};

/// Sign s with Q_n^{-m} = s * Q_n^m, for 1 <= m <= n.
inline int negative_order_relation(int n, int m)
{
    if (m < 1 || m > n)
        throw DomainError("negative_order_relation requires 1 <= m <= n");
    return m % 2 == 0 ? 1 : -1;
}

namespace detail {

inline void check_index(int n, int m)
{
    if (n < 0 || std::abs(m) > n)
        throw DomainError("Legendre index requires |m| <= n");
}

// (k-1)!! / k!! for even k >= 0.
inline double double_factorial_ratio(int k)
{
    if (k <= 40) {
        double r = 1.0;
        for (int j = 1; 2 * j <= k; ++j)
            r *= double(2 * j - 1) / double(2 * j);
        return r;
    }
    const double h = 0.5 * k;
    return std::exp(std::lgamma(h + 0.5) - std::lgamma(h + 1.0)) / std::sqrt(std::numbers::pi);
}

}  // namespace detail

/// Q_n^m(x) for |x| <= 1 by upward recurrence in n from Q_m^m.
inline double q_eval(int n, int m, double x)
{
    detail::check_index(n, m);
    const int am = std::abs(m);
    const double s = std::sqrt((1.0 - x) * (1.0 + x));

    // Q_m^m = (-1)^m sqrt((2m+1)/2 * (2m-1)!!^2/(2m)!) s^m
    double pmm = std::sqrt(0.5);
    for (int k = 1; k <= am; ++k)
        pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;

    double value = pmm;
    if (n > am) {
        double prev = pmm;
        double cur = x * std::sqrt(2.0 * am + 3.0) * pmm;
        for (int l = am + 2; l <= n; ++l) {
            const double ll = double(l);
            const double mm = double(am);
            const double alpha = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
            const double beta = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
            const double next = alpha * (x * cur - beta * prev);
            prev = cur;
            cur = next;
        }
        value = cur;
    }
    if (m < 0 && am % 2 == 1)
        value = -value;
    return value;
}

/// Q_n^m(0) from the closed form
///   Q_n^m(0)^2 = (2n+1)/2 * [(n-m-1)!!/(n-m)!!] * [(n+m-1)!!/(n+m)!!],
/// sign (-1)^{(n+m)/2}; zero when n - m is odd.
inline double q_at_zero(int n, int m)
{
    detail::check_index(n, m);
    if ((n - m) % 2 != 0)
        return 0.0;
    const int am = std::abs(m);
    const double mag = std::sqrt(0.5 * (2.0 * n + 1.0) * detail::double_factorial_ratio(n - am) *
                                 detail::double_factorial_ratio(n + am));
    double sign = ((n + am) / 2) % 2 == 0 ? 1.0 : -1.0;
    if (m < 0 && am % 2 == 1)
        sign = -sign;
    return sign * mag;
}

/// Immutable table of Q_n^m(0) for 0 <= n <= max_degree, all |m| <= n.
class QAtZeroTable
{
public:
    explicit QAtZeroTable(int max_degree) : max_degree_(max_degree)
    {
        if (max_degree < 0)
            throw DomainError("table degree must be non-negative");
        values_.reserve(std::size_t(max_degree + 1) * std::size_t(2 * max_degree + 1));
        for (int n = 0; n <= max_degree; ++n)
            for (int m = -n; m <= n; ++m)
                values_.push_back(q_at_zero(n, m));
    }

    int max_degree() const noexcept { return max_degree_; }

    double operator()(int n, int m) const
    {
        if (n > max_degree_)
            throw DomainError("degree exceeds table size");
        detail::check_index(n, m);
        return values_[std::size_t(n) * std::size_t(n) + std::size_t(m + n)];
    }

private:
    int max_degree_;
    std::vector<double> values_;
};

}  // namespace ellipstat
