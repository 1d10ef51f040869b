#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "ellipstat/analytic.hpp"
#include "ellipstat/bem.hpp"

using namespace ellipstat;

namespace {

double total(const LocalMatrix& L)
{
    double s = 0.0;
    for (const auto& row : L)
        for (double v : row)
            s += v;
    return s;
}

Panel panel(Point2 a, Point2 b, Point2 c, std::uint32_t ia, std::uint32_t ib, std::uint32_t ic)
{
    return {{a, b, c}, {ia, ib, ic}};
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

Eigen::MatrixXd dense(const EnergyMatrix& m)
{
    const auto n = Eigen::Index(m.dimension());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            d(i, j) = m(std::size_t(i), std::size_t(j));
    return d;
}

}  // namespace

TEST(PairClassification, Cases)
{
    EXPECT_EQ(classify_pair({0, 1, 2}, {3, 4, 5}).cls, PairClass::separated);
    EXPECT_EQ(classify_pair({0, 1, 2}, {2, 4, 5}).cls, PairClass::shared_vertex);
    EXPECT_EQ(classify_pair({0, 1, 2}, {1, 4, 0}).cls, PairClass::shared_edge);
    EXPECT_EQ(classify_pair({0, 1, 2}, {2, 0, 1}).cls, PairClass::identical);

    const PairClassification c = classify_pair({7, 3, 9}, {5, 9, 3});
    ASSERT_EQ(c.cls, PairClass::shared_edge);
    const Triangle t1{7, 3, 9}, t2{5, 9, 3};
    for (int k = 0; k < 2; ++k)
        EXPECT_EQ(t1[std::size_t(c.perm1[std::size_t(k)])], t2[std::size_t(c.perm2[std::size_t(k)])]);
    EXPECT_EQ(t1[std::size_t(c.perm1[2])], 7u);
    EXPECT_EQ(t2[std::size_t(c.perm2[2])], 5u);
}

TEST(SingularRules, WeightsSumToQuarter)
{
    const PairQuadrature quad(BemOptions{});
    for (PairClass c : {PairClass::identical, PairClass::shared_edge, PairClass::shared_vertex}) {
        double s = 0.0;
        for (const PairPoint& p : quad.singular(c)) {
            s += p.w;
            EXPECT_GE(p.u1, -1e-15);
            EXPECT_GE(p.v1, -1e-15);
            EXPECT_LE(p.u1 + p.v1, 1 + 1e-15);
            EXPECT_GE(p.u2, -1e-15);
            EXPECT_GE(p.v2, -1e-15);
            EXPECT_LE(p.u2 + p.v2, 1 + 1e-15);
        }
        EXPECT_NEAR(s, 0.25, 1e-14) << int(c);
    }
}

TEST(SingularRules, ConvergeWithOrder)
{
    const Panel t = panel({0, 0}, {1, 0}, {0.3, 0.8}, 0, 1, 2);
    const Panel e = panel({1, 0}, {0, 0}, {0.6, -0.7}, 1, 0, 3);
    const Panel v = panel({1, 0}, {2, 0.2}, {1.4, 0.9}, 1, 4, 5);
    for (const Panel* other : {&t, &e, &v}) {
        BemOptions ref_opts;
        ref_opts.q_sing = 20;
        const LocalMatrix ref = pair_matrix(t, *other, PairQuadrature(ref_opts));
        auto error = [&](int q_sing) {
            BemOptions o;
            o.q_sing = q_sing;
            const LocalMatrix a = pair_matrix(t, *other, PairQuadrature(o));
            double worst = 0.0;
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    worst = std::max(worst, rel(a[i][j], ref[i][j]));
            return worst;
        };
        double previous = error(4);
        for (int q = 6; q <= 10; q += 2) {
            const double err = error(q);
            EXPECT_LT(err, 0.05 * previous) << q;
            previous = err;
        }
        EXPECT_LT(error(6), 1e-6);
        EXPECT_LT(error(12), 1e-12);
    }
}

TEST(SingularRules, SubdivisionConsistency)
{
    // Splitting T into four similar children C_i gives I(C_i, C_i) = I(T, T)/8,
    // hence I(T, T) = 2 sum_{i != j} I(C_i, C_j), which ties the identical rule
    // to the edge and vertex rules.
    const Point2 p0{0, 0}, p1{1.2, 0.1}, p2{0.4, 0.9};
    const Point2 m01{0.6, 0.05}, m12{0.8, 0.5}, m20{0.2, 0.45};
    const Panel whole = panel(p0, p1, p2, 0, 1, 2);
    const Panel kids[4] = {
        panel(p0, m01, m20, 0, 3, 5),
        panel(m01, p1, m12, 3, 1, 4),
        panel(m20, m12, p2, 5, 4, 2),
        panel(m01, m12, m20, 3, 4, 5),
    };
    BemOptions opts;
    opts.q_sing = 10;
    const PairQuadrature quad(opts);
    const double self = total(pair_matrix(whole, whole, quad));
    double cross = 0.0;
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(total(pair_matrix(kids[i], kids[i], quad)), self / 8, 1e-13);
        for (int j = 0; j < 4; ++j)
            if (i != j)
                cross += total(pair_matrix(kids[i], kids[j], quad));
    }
    EXPECT_LT(rel(2 * cross, self), 1e-10);
}

TEST(SingularRules, SelfInteractionIndependentOfVertexOrder)
{
    const double s3 = std::sqrt(3.0);
    const Panel t = panel({0, 0}, {1, 0}, {0.5, s3 / 2}, 0, 1, 2);
    const Panel r = panel({0.5, s3 / 2}, {0, 0}, {1, 0}, 2, 0, 1);
    EXPECT_NEAR(total(pair_matrix(t, t, PairQuadrature())), total(pair_matrix(r, r, PairQuadrature())), 1e-14);
}

TEST(PairIntegrals, SymmetricUnderSwap)
{
    const Panel t1 = panel({0, 0}, {1, 0}, {0.3, 0.8}, 0, 1, 2);
    const Panel t2 = panel({1, 0}, {0, 0}, {0.6, -0.7}, 1, 0, 3);
    const Panel t3 = panel({3, 0}, {4, 0.2}, {3.4, 0.9}, 6, 7, 8);
    // The singular rules are not symmetric in their two panels: swapping
    // agrees to the rule's accuracy only.  Separated pairs agree exactly.
    BemOptions fine;
    fine.q_sing = 12;
    for (const PairQuadrature& quad : {PairQuadrature(), PairQuadrature(fine)}) {
        const double tol = quad.options().q_sing == 12 ? 1e-12 : 1e-6;
        const LocalMatrix a = pair_matrix(t1, t2, quad);
        const LocalMatrix b = pair_matrix(t2, t1, quad);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                EXPECT_NEAR(a[i][j], b[j][i], tol * std::abs(a[i][j]));
    }
    const LocalMatrix a = pair_matrix(t1, t3, PairQuadrature());
    const LocalMatrix b = pair_matrix(t3, t1, PairQuadrature());
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_NEAR(a[i][j], b[j][i], 1e-15 * std::abs(a[i][j]));
    EXPECT_THROW(pair_integral(t1, t2, 3, 0), DomainError);
}

TEST(PairIntegrals, FarFieldLimit)
{
    const Panel t1 = panel({0, 0}, {1, 0}, {0.3, 0.8}, 0, 1, 2);
    const Panel t2 = panel({100, 0}, {101, 0}, {100.3, 0.8}, 3, 4, 5);
    const double area = 0.4;
    EXPECT_LT(rel(total(pair_matrix(t1, t2, PairQuadrature())), area * area / (4 * std::numbers::pi * 100)), 1e-4);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            EXPECT_LT(rel(pair_integral(t1, t2, a, b), area * area / 9 / (4 * std::numbers::pi * 100)), 1e-2);
}

TEST(PairIntegrals, RegularRuleAccuracy)
{
    const Panel t1 = panel({0, 0}, {1, 0}, {0.3, 0.8}, 0, 1, 2);
    const Panel t2 = panel({1.3, 0.1}, {2.2, 0}, {1.8, 0.9}, 3, 4, 5);
    BemOptions hi;
    hi.q = 16;
    EXPECT_LT(rel(total(pair_matrix(t1, t2, PairQuadrature())), total(pair_matrix(t1, t2, PairQuadrature(hi)))), 1e-4);
}

TEST(BemOptions, Validation)
{
    BemOptions o;
    o.q = 0;
    EXPECT_THROW(PairQuadrature{o}, ConfigurationError);
    o = {};
    o.q_sing = 0;
    EXPECT_THROW(PairQuadrature{o}, ConfigurationError);
    o = {};
    o.far_ratio = -1;
    EXPECT_THROW(PairQuadrature{o}, ConfigurationError);
}

TEST(EnergyMatrix, SymmetricPositiveDefinite)
{
    for (int level = 0; level <= 3; ++level) {
        const TriangleMesh mesh = generate(Ellipse(1.3, 0.5), level);
        const EnergyMatrix m = assemble(mesh);
        for (std::size_t i = 0; i < m.dimension(); ++i)
            for (std::size_t j = 0; j < m.dimension(); ++j)
                ASSERT_EQ(m(i, j), m(j, i));
        const Eigen::MatrixXd d = dense(m);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d);
        EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0) << level;
        EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(d).info(), Eigen::Success);
    }
}

TEST(EnergyMatrix, Products)
{
    const TriangleMesh mesh = generate(Ellipse(1.1, 0.5), 2);
    const EnergyMatrix m = assemble(mesh);
    std::vector<double> c(m.dimension());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = std::sin(0.7 * double(i)) + 0.3;
    const std::vector<double> mc = m.multiply(c);
    double dot = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        dot += c[i] * mc[i];
    EXPECT_LT(rel(m.quadratic_form(c), dot), 1e-13);
    for (double r : m.row_sums())
        EXPECT_GT(r, 0.0);
    EXPECT_EQ(m.packed().size(), m.dimension() * (m.dimension() + 1) / 2);
    EXPECT_THROW(m.quadratic_form(std::vector<double>(3)), DomainError);
}

TEST(Assembly, IndependentOfWorkerCount)
{
    const TriangleMesh mesh = generate(Ellipse(1.5, 0.5), 3);
    BemOptions one, three, eight;
    three.workers = 3;
    eight.workers = 8;
    const EnergyMatrix a = assemble(mesh, one);
    EXPECT_EQ(a.packed(), assemble(mesh, three).packed());
    EXPECT_EQ(a.packed(), assemble(mesh, eight).packed());
    EXPECT_EQ(a.packed(), assemble(mesh, one).packed());
}

TEST(Bem, ConstantDensityBounds)
{
    const double v = bem_energy(generate(Ellipse(1, 1), 0), AffineDensity{1, 0, 0});
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 4.0 / 3.0);
}

TEST(Bem, LinearDensitiesAgreeOnCircle)
{
    const TriangleMesh mesh = generate(Ellipse(1, 1), 3);
    const EnergyMatrix m = assemble(mesh);
    EXPECT_LT(rel(bem_energy(m, mesh, {0, 1, 0}), bem_energy(m, mesh, {0, 0, 1})), 1e-12);
}

TEST(Bem, ScalesWithCubeOfSize)
{
    const Ellipse e(1.2, 0.5);
    const AffineDensity d{1, -2, 0.5};
    const double base = bem_energy(generate(e, 2), d);
    for (double lambda : {0.5, 2.0})
        EXPECT_LT(rel(bem_energy(generate(e.scaled(lambda), 2), d), lambda * lambda * lambda * base), 1e-12);
}

TEST(Bem, ConvergesAtSecondOrder)
{
    const Ellipse e(1.3, 0.5);
    for (const AffineDensity& d : {AffineDensity{1, 0, 0}, AffineDensity{0, 1, 0}, AffineDensity{3, 1.3, 1}}) {
        const double exact = analytic_energy(e, d);
        double prev = 1.0;
        for (int level = 1; level <= 4; ++level) {
            const double err = rel(bem_energy(generate(e, level), d), exact);
            EXPECT_LT(err, prev / 3.0) << level;
            prev = err;
        }
        EXPECT_LT(prev, 1e-3);
    }
}

TEST(Bem, QuadratureSelfConvergence)
{
    // at fixed mesh, raising the orders changes the energy by under 1% of the
    // discretization error
    const Ellipse e(1.5, 0.5);
    const TriangleMesh mesh = generate(e, 3);
    BemOptions hi;
    hi.q = 8;
    hi.q_sing = 10;
    hi.far_ratio = 1e9;
    const AffineDensity d{3, 1.5, 1};
    const double base = bem_energy(mesh, d);
    const double quadrature_error = rel(base, bem_energy(mesh, d, hi));
    const double discretization_error = rel(base, analytic_energy(e, d));
    EXPECT_LT(quadrature_error, 0.01 * discretization_error);
    EXPECT_LT(quadrature_error, 1e-5);
}
