#pragma once

// Spectral route: expansion of g = sigma cos(theta) in the basis
// Q_n^m(cos theta) e^{i m phi} (n - m even) over the half-sphere, the
// degree-wise blocks d^n_{mm'} of the 1/distance kernel, and the resulting
// energy series.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "elliptic.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "legendre.hpp"
#include "quadrature.hpp"

namespace ellipstat {

using Complex = std::complex<double>;

/// Triangular table u_n^m, 0 <= n <= N, |m| <= n, n - m even.
/// For real densities g_n^{-m} = (-1)^m conj(g_n^m).
class SpectralCoefficients
{
public:
    explicit SpectralCoefficients(int truncation) : truncation_(truncation)
    {
        if (truncation < 0)
            throw DomainError("truncation must be non-negative");
        entries_.assign(offset(truncation + 1), Complex{});
    }

    int truncation() const noexcept { return truncation_; }

    Complex& at(int n, int m) { return entries_[index(n, m)]; }
    const Complex& at(int n, int m) const { return entries_[index(n, m)]; }

    /// Zero for indices that do not participate in the expansion.
    Complex get(int n, int m) const noexcept
    {
        if (n < 0 || n > truncation_ || std::abs(m) > n || (n - m) % 2 != 0)
            return {};
        return entries_[offset(n) + std::size_t((m + n) / 2)];
    }

    const std::vector<Complex>& entries() const noexcept { return entries_; }

private:
    static std::size_t offset(int n) noexcept { return std::size_t(n) * std::size_t(n + 1) / 2; }

    std::size_t index(int n, int m) const
    {
        if (n < 0 || n > truncation_ || std::abs(m) > n || (n - m) % 2 != 0)
            throw DomainError("spectral index outside the truncated even basis");
        return offset(n) + std::size_t((m + n) / 2);
    }

    int truncation_;
    std::vector<Complex> entries_;
};

struct SpectralOptions
{
    int truncation = 30;
    // 0 selects the defaults 2N+16 (theta) and max(64, 4N) (phi)
    int theta_nodes = 0;
    int phi_nodes = 0;
};

/// Coefficients g_n^m of g = sigma cos(theta) for a real density given as a
/// function of the planar point.  Gauss-Legendre in x = cos(theta) over
/// [0, 1], periodic trapezoid in phi.
template <class Density>
    requires std::invocable<Density&, Point2>
SpectralCoefficients expand_density(const Ellipse& e, Density&& density, const SpectralOptions& opts = {})
{
    const int N = opts.truncation;
    if (N < 0)
        throw ConfigurationError("truncation must be non-negative");
    const int n_theta = opts.theta_nodes > 0 ? opts.theta_nodes : 2 * N + 16;
    const int n_phi = opts.phi_nodes > 0 ? opts.phi_nodes : std::max(64, 4 * N);
    if (n_theta < N + 2)
        throw ConfigurationError("too few theta nodes for the requested truncation");
    if (n_phi < 2 * N + 2)
        throw ConfigurationError("too few phi nodes for the requested truncation");

    const QuadratureRule xr = gauss_legendre(std::size_t(n_theta), 0.0, 1.0);
    const double dphi = 2.0 * std::numbers::pi / n_phi;

    std::vector<double> cos_phi(static_cast<std::size_t>(n_phi)), sin_phi(static_cast<std::size_t>(n_phi));
    for (int j = 0; j < n_phi; ++j) {
        cos_phi[std::size_t(j)] = std::cos(j * dphi);
        sin_phi[std::size_t(j)] = std::sin(j * dphi);
    }

    // fourier[i][m] = sum_j sigma(x_i, phi_j) e^{-i m phi_j} dphi, m = 0..N
    std::vector<Complex> fourier(std::size_t(n_theta) * std::size_t(N + 1));
    std::vector<double> samples(static_cast<std::size_t>(n_phi));
    for (int i = 0; i < n_theta; ++i) {
        const double x = xr.nodes[std::size_t(i)];
        const double s = std::sqrt((1.0 - x) * (1.0 + x));
        for (int j = 0; j < n_phi; ++j)
            samples[std::size_t(j)] =
                density(Point2{e.a() * s * cos_phi[std::size_t(j)], e.b() * s * sin_phi[std::size_t(j)]});
        for (int m = 0; m <= N; ++m) {
            double re = 0.0;
            double im = 0.0;
            for (int j = 0; j < n_phi; ++j) {
                // angle index reduced mod n_phi keeps the twiddles exact
                const std::size_t k = std::size_t((std::int64_t(m) * j) % n_phi);
                re += samples[std::size_t(j)] * cos_phi[k];
                im -= samples[std::size_t(j)] * sin_phi[k];
            }
            fourier[std::size_t(i) * std::size_t(N + 1) + std::size_t(m)] = Complex{re, im} * dphi;
        }
    }

    SpectralCoefficients g(N);
    for (int m = 0; m <= N; ++m) {
        for (int n = m; n <= N; n += 2) {
            Complex acc{};
            for (int i = 0; i < n_theta; ++i) {
                const double x = xr.nodes[std::size_t(i)];
                acc += fourier[std::size_t(i) * std::size_t(N + 1) + std::size_t(m)] *
                       (xr.weights[std::size_t(i)] * x * q_eval(n, m, x));
            }
            const Complex value = acc / std::numbers::pi;
            g.at(n, m) = value;
            if (m > 0)
                g.at(n, -m) = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(value);
        }
    }
    return g;
}

inline SpectralCoefficients expand_density(const Ellipse& e, const AffineDensity& d, const SpectralOptions& opts = {})
{
    return expand_density(e, [&](Point2 p) { return d(e, p); }, opts);
}

/// sum_n sum_m u_n^m Q_n^m(cos theta) e^{i m phi}.
inline Complex evaluate(const SpectralCoefficients& u, SpheroidalPoint p)
{
    const double x = std::cos(p.theta);
    Complex sum{};
    for (int n = 0; n <= u.truncation(); ++n)
        for (int m = -n; m <= n; m += 2)
            sum += u.at(n, m) * q_eval(n, m, x) * std::polar(1.0, m * p.phi);
    return sum;
}

/// int_0^{pi/2} cos(delta_m phi) / sqrt(1 - eps^2 cos^2 phi) dphi.
inline double angular_integral(int delta_m, double eps)
{
    if (!(eps >= 0.0) || !(eps < 1.0))
        throw DomainError("angular_integral requires 0 <= eps < 1");
    if (delta_m < 0)
        throw DomainError("angular_integral requires a non-negative order difference");
    const double m = eps * eps;
    auto f = [&](double phi) {
        const double c = std::cos(phi);
        return std::cos(delta_m * phi) / std::sqrt(1.0 - m * c * c);
    };
    return integrate_adaptive(f, 0.0, 0.5 * std::numbers::pi, 1e-13).value;
}

/// Memoized angular integrals for a fixed eccentricity.
class AngularIntegralCache
{
public:
    explicit AngularIntegralCache(double eps) : eps_(eps) {}

    double eccentricity() const noexcept { return eps_; }

    double operator()(int delta_m)
    {
        const std::size_t k = std::size_t(std::abs(delta_m));
        if (k >= values_.size()) {
            values_.resize(k + 1);
            known_.resize(k + 1, false);
        }
        if (!known_[k]) {
            values_[k] = angular_integral(int(k), eps_);
            known_[k] = true;
        }
        return values_[k];
    }

private:
    double eps_;
    std::vector<double> values_;
    std::vector<bool> known_;
};

/// d^n_{mm'} for the orders m = -n, -n+2, ..., n.  Row-major, Hermitian.
struct DiagonalBlock
{
    int n = 0;
    std::vector<int> orders;
    std::vector<Complex> values;

    std::size_t size() const noexcept { return orders.size(); }
    const Complex& operator()(std::size_t i, std::size_t j) const { return values[i * orders.size() + j]; }
};

namespace detail {

// int_0^{2 pi} e^{i k phi} / sqrt((b/a) cos^2 + (a/b) sin^2) dphi for k = 0..kmax,
// periodic trapezoid refined by doubling until converged to 1e-13.
inline std::vector<Complex> block_phi_integrals(const Ellipse& e, int kmax)
{
    const double ratio = e.b() / e.a();
    auto eval = [&](int n_pts) {
        std::vector<Complex> out(std::size_t(kmax + 1));
        const double h = 2.0 * std::numbers::pi / n_pts;
        for (int j = 0; j < n_pts; ++j) {
            const double phi = j * h;
            const double c = std::cos(phi);
            const double s = std::sin(phi);
            const double w = 1.0 / std::sqrt(ratio * c * c + s * s / ratio);
            for (int k = 0; k <= kmax; ++k)
                out[std::size_t(k)] += std::polar(w * h, k * phi);
        }
        return out;
    };
    int n_pts = std::max(64, 4 * kmax + 8);
    std::vector<Complex> prev = eval(n_pts);
    for (int iter = 0; iter < 16; ++iter) {
        n_pts *= 2;
        std::vector<Complex> cur = eval(n_pts);
        double diff = 0.0;
        for (int k = 0; k <= kmax; ++k)
            diff = std::max(diff, std::abs(cur[std::size_t(k)] - prev[std::size_t(k)]));
        prev = std::move(cur);
        if (diff <= 1e-13 * std::max(1.0, std::abs(prev[0])))
            return prev;
    }
    throw ConvergenceError("phi integral of the diagonal block did not converge");
}

inline DiagonalBlock make_block(int n, const std::vector<Complex>& phi_integrals)
{
    DiagonalBlock block;
    block.n = n;
    for (int m = -n; m <= n; m += 2)
        block.orders.push_back(m);
    const std::size_t k = block.orders.size();
    block.values.resize(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const int mi = block.orders[i];
            const int mj = block.orders[j];
            const int diff = mi - mj;
            // the integral of e^{-i k phi} is the conjugate of that of e^{i k phi}
            const Complex integral = diff >= 0 ? phi_integrals[std::size_t(diff)]
                                               : std::conj(phi_integrals[std::size_t(-diff)]);
            block.values[i * k + j] = q_at_zero(n, mi) * q_at_zero(n, mj) / (2.0 * n + 1.0) * integral;
        }
    return block;
}

}  // namespace detail

inline DiagonalBlock block_d(const Ellipse& e, int n)
{
    if (n < 0)
        throw DomainError("block degree must be non-negative");
    return detail::make_block(n, detail::block_phi_integrals(e, 2 * n));
}

/// f_n^m = (sqrt(ab)/4) sum_{m'} d^n_{mm'} g_n^{m'}.
inline SpectralCoefficients potential_coefficients(const Ellipse& e, const SpectralCoefficients& g)
{
    const int N = g.truncation();
    const std::vector<Complex> phi_integrals = detail::block_phi_integrals(e, 2 * N);
    const double scale = 0.25 * std::sqrt(e.a() * e.b());
    SpectralCoefficients f(N);
    for (int n = 0; n <= N; ++n) {
        const DiagonalBlock d = detail::make_block(n, phi_integrals);
        for (std::size_t i = 0; i < d.size(); ++i) {
            Complex acc{};
            for (std::size_t j = 0; j < d.size(); ++j)
                acc += d(i, j) * g.at(n, d.orders[j]);
            f.at(n, d.orders[i]) = scale * acc;
        }
    }
    return f;
}

struct SeriesTerm
{
    int degree;
    double value;
};

/// Per-degree contributions pi a b^2 / (2n+1) sum_{m,m'} g_n^m conj(g_n^m')
/// Q_n^m(0) Q_n^m'(0) A(|m - m'|, eps), ascending in n.
inline std::vector<SeriesTerm> energy_series_terms(const Ellipse& e, const SpectralCoefficients& g)
{
    const double eps = e.eccentricity();
    AngularIntegralCache angular(eps);
    const int N = g.truncation();
    const double prefactor = std::numbers::pi * e.a() * e.b() * e.b();

    std::vector<SeriesTerm> terms;
    terms.reserve(std::size_t(N + 1));
    for (int n = 0; n <= N; ++n) {
        KahanSum re;
        KahanSum im;
        double magnitude = 0.0;
        for (int m = -n; m <= n; m += 2) {
            const Complex gm = g.at(n, m) * q_at_zero(n, m);
            for (int mp = -n; mp <= n; mp += 2) {
                const Complex t = gm * std::conj(g.at(n, mp)) * q_at_zero(n, mp) * angular(m - mp);
                re += t.real();
                im += t.imag();
                magnitude += std::abs(t);
            }
        }
        if (std::abs(im.value()) > 1e-12 * magnitude)
            throw ConvergenceError("energy series produced a non-real term");
        terms.push_back({n, prefactor * re.value() / (2.0 * n + 1.0)});
    }
    return terms;
}

inline double energy_series(const Ellipse& e, const SpectralCoefficients& g)
{
    KahanSum total;
    for (const SeriesTerm& t : energy_series_terms(e, g))
        total += t.value;
    return total.value();
}

inline double spectral_energy(const Ellipse& e, const AffineDensity& d, int truncation = 30)
{
    SpectralOptions opts;
    opts.truncation = truncation;
    return energy_series(e, expand_density(e, d, opts));
}

}  // namespace ellipstat
