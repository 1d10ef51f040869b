#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "ellipstat/analytic.hpp"
#include "ellipstat/quadrature.hpp"
#include "ellipstat/spectral.hpp"

using namespace ellipstat;

namespace {

const double table_a[] = {0.5, 0.7, 0.9, 1.1, 1.3, 1.5};

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(Spectral, CircleConstantDensity)
{
    EXPECT_LT(rel(spectral_energy(Ellipse(1, 1), AffineDensity{1, 0, 0}, 30), 4.0 / 3.0), 1e-4);
}

TEST(Spectral, AgreesWithClosedFormOnTableGeometries)
{
    for (double a : table_a) {
        const Ellipse e(a, 0.5);
        for (const AffineDensity& d : {AffineDensity{1, 0, 0}, AffineDensity{0, 1, 0}, AffineDensity{0, 0, 1}}) {
            SCOPED_TRACE(a);
            EXPECT_LT(rel(spectral_energy(e, d, 30), analytic_energy(e, d)), 1e-4);
        }
    }
}

TEST(Spectral, ConstantDensityHasOnlyZeroOrder)
{
    const Ellipse e(1.3, 0.5);
    SpectralOptions opts;
    opts.truncation = 12;
    const SpectralCoefficients g = expand_density(e, AffineDensity{1, 0, 0}, opts);
    for (int n = 0; n <= 12; ++n)
        for (int m = -n; m <= n; m += 2)
            if (m != 0) {
                EXPECT_LT(std::abs(g.at(n, m)), 1e-14) << n << ' ' << m;
            }
    EXPECT_GT(std::abs(g.at(0, 0)), 0.1);
}

TEST(Spectral, RealDensitySymmetry)
{
    const Ellipse e(1.5, 0.5);
    SpectralOptions opts;
    opts.truncation = 16;
    const SpectralCoefficients g = expand_density(e, AffineDensity{3, 1.5, 1}, opts);
    for (int n = 1; n <= 16; ++n)
        for (int m = 2 - n % 2; m <= n; m += 2) {
            const Complex want = double(negative_order_relation(n, m)) * std::conj(g.at(n, m));
            EXPECT_LT(std::abs(g.at(n, -m) - want), 1e-14) << n << ' ' << m;
        }
}

TEST(Spectral, CoefficientTableIndexing)
{
    SpectralCoefficients g(4);
    EXPECT_EQ(g.entries().size(), 15u);
    g.at(4, -2) = Complex(1, 2);
    EXPECT_EQ(g.get(4, -2), Complex(1, 2));
    EXPECT_EQ(g.get(4, -1), Complex{});
    EXPECT_EQ(g.get(5, 1), Complex{});
    EXPECT_THROW(g.at(3, 0), DomainError);
    EXPECT_THROW(g.at(5, 1), DomainError);
    EXPECT_THROW(SpectralCoefficients(-1), DomainError);
}

TEST(Spectral, RejectsUnderResolvedQuadrature)
{
    SpectralOptions opts;
    opts.truncation = 10;
    opts.theta_nodes = 11;
    EXPECT_THROW(expand_density(Ellipse(1, 1), AffineDensity{1, 0, 0}, opts), ConfigurationError);
    opts.theta_nodes = 0;
    opts.phi_nodes = 21;
    EXPECT_THROW(expand_density(Ellipse(1, 1), AffineDensity{1, 0, 0}, opts), ConfigurationError);
}

TEST(Spectral, ExpansionReproducesLinearDensityOnEquator)
{
    // g = sigma cos(theta) is even in cos(theta) after extension, and the
    // truncated series converges pointwise away from theta = pi/2.
    const Ellipse e(1.2, 0.5);
    SpectralOptions opts;
    opts.truncation = 40;
    const AffineDensity d{0.5, 1.0, -2.0};
    const SpectralCoefficients g = expand_density(e, d, opts);
    for (double theta : {0.2, 0.6, 1.0})
        for (double phi : {0.0, 1.1, 4.0}) {
            const SpheroidalPoint p{theta, phi};
            const Complex v = evaluate(g, p);
            EXPECT_NEAR(v.real(), density_on_sphere(e, d, p), 2e-3);
            EXPECT_LT(std::abs(v.imag()), 1e-12);
        }
}

TEST(Spectral, AngularIntegral)
{
    EXPECT_NEAR(angular_integral(0, 0.0), std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(angular_integral(3, 0.0), std::sin(1.5 * std::numbers::pi) / 3, 1e-15);
    EXPECT_NEAR(angular_integral(2, 0.0), 0.0, 1e-15);
    // 2K + 2 int cos(2 phi)/sqrt(...) = 4 (K - E)/eps^2
    const double eps = 2 * std::sqrt(2.0) / 3;
    EXPECT_NEAR(2 * complete_K(eps) + 2 * angular_integral(2, eps), 4 * k_minus_e_over_eps2(eps), 1e-12);
    EXPECT_NEAR(angular_integral(0, 0.8), complete_K(0.8), 1e-13);
    AngularIntegralCache cache(0.6);
    EXPECT_EQ(cache(4), angular_integral(4, 0.6));
    EXPECT_EQ(cache(-4), cache(4));
    EXPECT_THROW(angular_integral(0, 1.0), DomainError);
    EXPECT_THROW(angular_integral(-1, 0.5), DomainError);
}

TEST(Spectral, DiagonalBlocksHermitianPositive)
{
    for (double a : {1.0, 1.5, 3.0}) {
        const Ellipse e(a, 1.0);
        for (int n = 0; n <= 20; ++n) {
            const DiagonalBlock d = block_d(e, n);
            const auto k = Eigen::Index(d.size());
            Eigen::MatrixXcd m(k, k);
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j)
                    m(i, j) = d(std::size_t(i), std::size_t(j));
            EXPECT_LT((m - m.adjoint()).norm(), 1e-14 * std::max(1.0, m.norm())) << n;
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
            EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-13 * std::max(1e-300, eig.eigenvalues().maxCoeff()))
                << "a=" << a << " n=" << n;
        }
    }
    EXPECT_THROW(block_d(Ellipse(1, 1), -1), DomainError);
}

TEST(Spectral, ConstantDensityCoefficients)
{
    SpectralOptions opts;
    opts.truncation = 6;
    const SpectralCoefficients g = expand_density(Ellipse(1.4, 0.6), AffineDensity{1, 0, 0}, opts);
    EXPECT_NEAR(g.at(0, 0).real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g.at(2, 0).real(), std::sqrt(2.5) / 4, 1e-15);
}

TEST(Spectral, LinearDensitiesUseOrdersPlusMinusOne)
{
    SpectralOptions opts;
    opts.truncation = 15;
    const Ellipse e(1.5, 0.5);
    const SpectralCoefficients g1 = expand_density(e, AffineDensity{0, 1, 0}, opts);
    const SpectralCoefficients g2 = expand_density(e, AffineDensity{0, 0, 1}, opts);
    for (int n = 1; n <= 15; n += 2) {
        for (int m = -n; m <= n; m += 2)
            if (std::abs(m) != 1) {
                EXPECT_LT(std::abs(g1.at(n, m)), 1e-14);
                EXPECT_LT(std::abs(g2.at(n, m)), 1e-14);
            }
        EXPECT_LT(std::abs(g1.at(n, -1) + g1.at(n, 1)), 1e-14) << n;
        EXPECT_LT(std::abs(g2.at(n, -1) - g2.at(n, 1)), 1e-14) << n;
        EXPECT_GT(std::abs(g1.at(n, 1)), 1e-6);
    }
}

TEST(Spectral, CircleBlocksAreDiagonal)
{
    const double pi = std::numbers::pi;
    EXPECT_NEAR(block_d(Ellipse(1, 1), 0)(0, 0).real(), pi, 1e-14);
    for (int n = 1; n <= 8; ++n) {
        const DiagonalBlock d = block_d(Ellipse(2, 2), n);
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = 0; j < d.size(); ++j) {
                const double q = q_at_zero(n, d.orders[i]);
                const Complex want = i == j ? Complex(2 * pi * q * q / (2 * n + 1)) : Complex{};
                EXPECT_LT(std::abs(d(i, j) - want), 1e-14);
            }
    }
}

TEST(Spectral, BlockEntryMatchesIndependentQuadrature)
{
    // n = 2, a = 1.5, b = 0.5, (m, m') = (0, 0)
    const DiagonalBlock d = block_d(Ellipse(1.5, 0.5), 2);
    std::size_t zero = 0;
    while (d.orders[zero] != 0)
        ++zero;
    auto f = [](double phi) { return 1 / std::sqrt(std::cos(phi) * std::cos(phi) / 3 + 3 * std::sin(phi) * std::sin(phi)); };
    const QuadratureRule r = gauss_legendre(400, 0.0, 2 * std::numbers::pi);
    double integral = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        integral += r.weights[i] * f(r.nodes[i]);
    const double q = q_at_zero(2, 0);
    EXPECT_NEAR(d(zero, zero).real(), q * q / 5 * integral, 1e-12);
    EXPECT_EQ(d(zero, zero).imag(), 0.0);
}

TEST(Spectral, PotentialCoefficients)
{
    const double pi = std::numbers::pi;
    SpectralOptions opts;
    opts.truncation = 10;
    const Ellipse circle(1, 1);
    const SpectralCoefficients g = expand_density(circle, AffineDensity{1, 0, 0}, opts);
    const SpectralCoefficients f = potential_coefficients(circle, g);
    for (int n = 0; n <= 10; n += 2) {
        const double q = q_at_zero(n, 0);
        const double expected = pi / 2 * q * q * g.at(n, 0).real() / (2 * n + 1);
        EXPECT_NEAR(f.at(n, 0).real(), expected, 1e-13 * std::abs(expected)) << n;
    }

    const SpectralCoefficients zero(10);
    const SpectralCoefficients f_zero = potential_coefficients(Ellipse(1.5, 0.5), zero);
    for (const Complex& c : f_zero.entries())
        EXPECT_EQ(c, Complex{});

    // g depends only on the shape, f scales with sqrt(ab)
    const Ellipse e(1.5, 0.5);
    const SpectralCoefficients ge = expand_density(e, AffineDensity{1, 2, 3}, opts);
    const SpectralCoefficients f1 = potential_coefficients(e, ge);
    const SpectralCoefficients f2 = potential_coefficients(e.scaled(2), ge);
    for (std::size_t k = 0; k < f1.entries().size(); ++k)
        EXPECT_LT(std::abs(f2.entries()[k] - 2.0 * f1.entries()[k]), 1e-14 * std::max(1.0, std::abs(f1.entries()[k])));
}

TEST(Spectral, CircleLinearDensity)
{
    EXPECT_LT(rel(spectral_energy(Ellipse(1, 1), AffineDensity{0, 1, 0}, 40), 2.0 / 15.0), 1e-4);
}

TEST(Spectral, PartialSumsIncreaseOnCircle)
{
    const Ellipse e(1, 1);
    SpectralOptions opts;
    opts.truncation = 30;
    const auto terms = energy_series_terms(e, expand_density(e, AffineDensity{1, 0, 0}, opts));
    double sum = 0.0, prev = -1.0;
    for (const SeriesTerm& t : terms) {
        EXPECT_GE(t.value, -1e-15);
        sum += t.value;
        if (t.degree % 2 == 0) {
            EXPECT_GT(sum, prev) << t.degree;
            prev = sum;
        }
        EXPECT_LT(sum, 4.0 / 3.0);
    }
}

TEST(Spectral, ScalesWithCubeOfSize)
{
    const Ellipse e(1.3, 0.5);
    const AffineDensity d{1, 2, -1};
    const double base = spectral_energy(e, d, 20);
    for (double lambda : {0.5, 2.0})
        EXPECT_LT(rel(spectral_energy(e.scaled(lambda), d, 20), lambda * lambda * lambda * base), 1e-12);
}
