#include <cmath>
#include <numbers>

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <gtest/gtest.h>

#include "ellipstat/elliptic.hpp"

using namespace ellipstat;

namespace {

constexpr double pi = std::numbers::pi;

void expect_rel(double got, double want, double tol)
{
    EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << "got " << got << " want " << want;
}

}  // namespace

TEST(Agm, KnownValue)
{
    expect_rel(agm(1.0, 1.0 / 3.0), 0.621205594414965514, 1e-15);
    expect_rel(agm(1.0, 1.0), 1.0, 0.0);
    expect_rel(agm(2.0, 8.0), agm(8.0, 2.0), 1e-16);
}

TEST(Agm, RejectsNonPositive)
{
    EXPECT_THROW(agm(0.0, 1.0), DomainError);
    EXPECT_THROW(agm(1.0, -1.0), DomainError);
}

TEST(CompleteIntegrals, ReferenceValues)
{
    // tol covers the rounding of eps itself, which K amplifies as eps -> 1
    struct Row { double eps, k, e, kme, tol; };
    const Row rows[] = {
        {0.1, 1.5747455615173559527, 1.5668619420216682912, 0.78836194956876614486, 2e-15},
        {0.5, 1.6857503548125960429, 1.4674622093394271555, 0.87315258189267554965, 2e-15},
        {0.9, 2.2805491384227702046, 1.1716970527816141412, 1.3689531921495753869, 4e-15},
        {0.99, 3.356600523361192376, 1.028475809028804001, 2.3753950763517889757, 1e-14},
        {0.999999, 7.947479773562344765, 1.0000074474777241924, 6.9474862210501151867, 1e-11},
        {2.0 * std::sqrt(2.0) / 3.0, 2.52862553221889406, 1.11374110171293819, 1.59174498431920036, 4e-15},
    };
    for (const Row& r : rows) {
        SCOPED_TRACE(r.eps);
        expect_rel(complete_K(r.eps), r.k, r.tol);
        expect_rel(complete_E(r.eps), r.e, r.tol);
        expect_rel(k_minus_e_over_eps2(r.eps), r.kme, 2 * r.tol);
    }
}

TEST(CompleteIntegrals, Endpoints)
{
    EXPECT_DOUBLE_EQ(complete_K(0.0), pi / 2);
    EXPECT_DOUBLE_EQ(complete_E(0.0), pi / 2);
    EXPECT_DOUBLE_EQ(complete_E(1.0), 1.0);
    EXPECT_DOUBLE_EQ(k_minus_e_over_eps2(0.0), pi / 4);
    EXPECT_THROW(complete_K(1.0), DomainError);
    EXPECT_THROW(complete_K(-0.1), DomainError);
    EXPECT_THROW(complete_E(1.5), DomainError);
    EXPECT_THROW(complete_E(std::nan("")), DomainError);
}

TEST(CompleteIntegrals, AgreeWithBoost)
{
    for (int i = 0; i < 200; ++i) {
        const double eps = i / 200.0 * 0.999;
        SCOPED_TRACE(eps);
        expect_rel(complete_K(eps), boost::math::ellint_1(eps), 4e-15);
        expect_rel(complete_E(eps), boost::math::ellint_2(eps), 4e-15);
    }
}

TEST(CompleteIntegrals, LegendreRelation)
{
    for (int i = 1; i < 100; ++i) {
        const double k = i / 100.0;
        const double kp = std::sqrt((1.0 - k) * (1.0 + k));
        const double lhs = complete_E(k) * complete_K(kp) + complete_E(kp) * complete_K(k) -
                           complete_K(k) * complete_K(kp);
        EXPECT_NEAR(lhs, pi / 2, 1e-12) << "k = " << k;
    }
}

TEST(CompleteIntegrals, Monotone)
{
    double k_prev = complete_K(0.0), e_prev = complete_E(0.0), q_prev = k_minus_e_over_eps2(0.0);
    for (int i = 1; i < 1000; ++i) {
        const double eps = i / 1000.0;
        const double k = complete_K(eps), e = complete_E(eps), q = k_minus_e_over_eps2(eps);
        EXPECT_GT(k, k_prev);
        EXPECT_LT(e, e_prev);
        EXPECT_GT(q, q_prev);
        EXPECT_LE(e, k);
        k_prev = k, e_prev = e, q_prev = q;
    }
}

TEST(KMinusE, SmallEccentricity)
{
    // pi/4 (1 + 3m/8 + 15m^2/64 + ...), m = eps^2
    expect_rel(k_minus_e_over_eps2(1e-3), 0.78539845792194366149, 1e-15);
    for (double eps : {1e-8, 1e-6, 1e-4, 3e-3}) {
        const double m = eps * eps;
        expect_rel(k_minus_e_over_eps2(eps), pi / 4 * (1 + 3 * m / 8 + 15 * m * m / 64), 1e-14);
    }
}

TEST(KMinusE, ContinuousAcrossSeriesThreshold)
{
    const double seam = std::sqrt(k_minus_e_series_threshold);
    const double below = k_minus_e_over_eps2(std::nextafter(seam, 0.0));
    const double above = k_minus_e_over_eps2(std::nextafter(seam, 1.0));
    expect_rel(below, above, 1e-15);
}

TEST(EllipticPair, MatchesSeparateCalls)
{
    const EllipticPair p = elliptic_pair(0.7);
    EXPECT_EQ(p.k_value, complete_K(0.7));
    EXPECT_EQ(p.e_value, complete_E(0.7));
    EXPECT_EQ(p.modulus, 0.7);
}
