#pragma once

// P1 Galerkin evaluation of the single-layer energy
//   I = (1/4pi) int int sigma(x) sigma(y) / |x - y| ds_x ds_y
// on a triangulated disc.  Adjacent and coincident triangle pairs are
// integrated with the Sauter-Schwab regularizing transforms; separated pairs
// use tensor Gauss rules whose order is lowered for well-separated pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace ellipstat {

enum class PairClass { separated = 0, shared_vertex = 1, shared_edge = 2, identical = 3 };

/// perm1/perm2 list the local vertex numbers of each triangle, shared
/// vertices first and in matching order.
struct PairClassification
{
    PairClass cls = PairClass::separated;
    std::array<int, 3> perm1{0, 1, 2};
    std::array<int, 3> perm2{0, 1, 2};
};

inline PairClassification classify_pair(const Triangle& t1, const Triangle& t2) noexcept
{
    PairClassification out;
    int common = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (t1[std::size_t(i)] == t2[std::size_t(j)]) {
                out.perm1[std::size_t(common)] = i;
                out.perm2[std::size_t(common)] = j;
                ++common;
                break;
            }

    auto complete = [common](std::array<int, 3>& perm) {
        int filled = common;
        for (int i = 0; i < 3 && filled < 3; ++i) {
            bool used = false;
            for (int k = 0; k < filled; ++k)
                used = used || perm[std::size_t(k)] == i;
            if (!used)
                perm[std::size_t(filled++)] = i;
        }
    };
    complete(out.perm1);
    complete(out.perm2);
    out.cls = PairClass(common);
    return out;
}

/// Quadrature point of a triangle-pair rule: (u1, v1) on the first and
/// (u2, v2) on the second reference triangle, barycentrics (1-u-v, u, v)
/// relative to the permuted vertices.  Weights sum to 1/4.
struct PairPoint
{
    double u1, v1, u2, v2, w;
};

using PairRule = std::vector<PairPoint>;

namespace detail {

// Sauter-Schwab rules on the reference pair.  Points are generated on
// {0 <= y <= x <= 1} and mapped to the unit triangle by (x - y, y).  The
// regularized integrand is a polynomial of degree 4 in the radial variable xi,
// so xi_order = 3 integrates it exactly.
template <class Emit>
void sauter_schwab_loop(std::size_t order, std::size_t xi_order, Emit&& emit)
{
    const QuadratureRule g = gauss_legendre(order, 0.0, 1.0);
    const QuadratureRule gx = gauss_legendre(xi_order, 0.0, 1.0);
    for (std::size_t i = 0; i < xi_order; ++i)
        for (std::size_t k3 = 0; k3 < order; ++k3)
            for (std::size_t k2 = 0; k2 < order; ++k2)
                for (std::size_t k1 = 0; k1 < order; ++k1)
                    emit(gx.nodes[i], g.nodes[k1], g.nodes[k2], g.nodes[k3],
                         gx.weights[i] * g.weights[k1] * g.weights[k2] * g.weights[k3]);
}

inline void push_point(PairRule& rule, double x1, double y1, double x2, double y2, double w)
{
    rule.push_back({x1 - y1, y1, x2 - y2, y2, w});
}

inline PairRule rule_identical(std::size_t order, std::size_t xi_order)
{
    PairRule r;
    r.reserve(6 * xi_order * order * order * order);
    sauter_schwab_loop(order, xi_order, [&](double xi, double e1, double e2, double e3, double w0) {
        const double w = w0 * xi * xi * xi * e1 * e1 * e2;
        push_point(r, xi, xi * (1.0 - e1 + e1 * e2), xi * (1.0 - e1 * e2 * e3), xi * (1.0 - e1), w);
        push_point(r, xi * (1.0 - e1 * e2 * e3), xi * (1.0 - e1), xi, xi * (1.0 - e1 + e1 * e2), w);
        push_point(r, xi, xi * (e1 * (1.0 - e2 + e2 * e3)), xi * (1.0 - e1 * e2), xi * (e1 * (1.0 - e2)), w);
        push_point(r, xi * (1.0 - e1 * e2), xi * (e1 * (1.0 - e2)), xi, xi * (e1 * (1.0 - e2 + e2 * e3)), w);
        push_point(r, xi * (1.0 - e1 * e2 * e3), xi * (e1 * (1.0 - e2 * e3)), xi, xi * (e1 * (1.0 - e2)), w);
        push_point(r, xi, xi * (e1 * (1.0 - e2)), xi * (1.0 - e1 * e2 * e3), xi * (e1 * (1.0 - e2 * e3)), w);
    });
    return r;
}

inline PairRule rule_edge(std::size_t order, std::size_t xi_order)
{
    PairRule r;
    r.reserve(5 * xi_order * order * order * order);
    sauter_schwab_loop(order, xi_order, [&](double xi, double e1, double e2, double e3, double w0) {
        const double w = w0 * xi * xi * xi * e1 * e1 * e2;
        push_point(r, xi, xi * e1 * e3, xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2), w0 * xi * xi * xi * e1 * e1);
        push_point(r, xi, xi * e1, xi * (1.0 - e1 * e2 * e3), xi * e1 * e2 * (1.0 - e3), w);
        push_point(r, xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2), xi, xi * e1 * e2 * e3, w);
        push_point(r, xi * (1.0 - e1 * e2 * e3), xi * e1 * e2 * (1.0 - e3), xi, xi * e1, w);
        push_point(r, xi * (1.0 - e1 * e2 * e3), xi * e1 * (1.0 - e2 * e3), xi, xi * e1 * e2, w);
    });
    return r;
}

inline PairRule rule_vertex(std::size_t order, std::size_t xi_order)
{
    PairRule r;
    r.reserve(2 * xi_order * order * order * order);
    sauter_schwab_loop(order, xi_order, [&](double xi, double e1, double e2, double e3, double w0) {
        const double w = w0 * xi * xi * xi * e2;
        push_point(r, xi, xi * e1, xi * e2, xi * e2 * e3, w);
        push_point(r, xi * e2, xi * e2 * e3, xi, xi * e1, w);
    });
    return r;
}

}  // namespace detail

struct BemOptions
{
    int q = 4;            // Gauss order for separated pairs
    int q_sing = 6;       // Gauss order of the singular transforms
    double far_ratio = 4; // pairs farther apart than far_ratio diameters use q - 2
    unsigned workers = 1;
};

/// Quadrature rules for one (q, q_sing) setting.
class PairQuadrature
{
public:
    explicit PairQuadrature(const BemOptions& opts = {}) : opts_(opts)
    {
        if (opts.q < 1 || opts.q_sing < 1)
            throw ConfigurationError("quadrature orders must be positive");
        if (!(opts.far_ratio > 0.0))
            throw ConfigurationError("far-field ratio must be positive");
        const auto qs = std::size_t(opts.q_sing);
        const std::size_t xi = std::min<std::size_t>(qs, 3);
        identical_ = detail::rule_identical(qs, xi);
        edge_ = detail::rule_edge(qs, xi);
        vertex_ = detail::rule_vertex(qs, xi);
        near_ = collapsed_gauss_triangle(std::size_t(opts.q));
        far_ = collapsed_gauss_triangle(std::size_t(std::max(1, opts.q - 2)));
    }

    const BemOptions& options() const noexcept { return opts_; }
    const PairRule& singular(PairClass c) const noexcept
    {
        return c == PairClass::identical ? identical_ : c == PairClass::shared_edge ? edge_ : vertex_;
    }
    const std::vector<TrianglePoint>& near_rule() const noexcept { return near_; }
    const std::vector<TrianglePoint>& far_rule() const noexcept { return far_; }

private:
    BemOptions opts_;
    PairRule identical_, edge_, vertex_;
    std::vector<TrianglePoint> near_, far_;
};

/// A triangle with its mesh node ids (used to detect shared vertices).
struct Panel
{
    std::array<Point2, 3> v;
    Triangle ids;
};

inline Panel panel_of(const TriangleMesh& m, std::size_t t)
{
    const Triangle& tri = m.triangles[t];
    return {{m.nodes[tri[0]], m.nodes[tri[1]], m.nodes[tri[2]]}, tri};
}

/// L[a][b] = (1/4pi) int_T1 int_T2 phi_a(x) phi_b(y) / |x - y|, with phi the
/// P1 hat functions of the panels' own vertex order.
using LocalMatrix = std::array<std::array<double, 3>, 3>;

namespace detail {

constexpr double inv_four_pi = 0.25 / std::numbers::pi;

struct PanelGeometry
{
    Point2 centroid;
    double radius;    // max distance centroid -> vertex
    double diameter;  // longest edge
    double area;
};

inline PanelGeometry panel_geometry(const Panel& p)
{
    PanelGeometry g{};
    g.centroid = {(p.v[0].x1 + p.v[1].x1 + p.v[2].x1) / 3.0, (p.v[0].x2 + p.v[1].x2 + p.v[2].x2) / 3.0};
    g.area = 0.5 * signed_area2(p.v[0], p.v[1], p.v[2]);
    if (!(std::abs(g.area) > 0.0))
        throw DomainError("degenerate triangle");
    g.area = std::abs(g.area);
    for (int k = 0; k < 3; ++k) {
        const Point2 a = p.v[std::size_t(k)];
        const Point2 b = p.v[std::size_t((k + 1) % 3)];
        g.radius = std::max(g.radius, std::hypot(a.x1 - g.centroid.x1, a.x2 - g.centroid.x2));
        g.diameter = std::max(g.diameter, std::hypot(b.x1 - a.x1, b.x2 - a.x2));
    }
    return g;
}

// Physical quadrature points of a panel for a regular triangle rule; the
// weights carry the Jacobian 2|T|.
struct PanelPoints
{
    std::vector<Point2> x;
    std::vector<double> w;
    std::vector<std::array<double, 3>> phi;
};

inline PanelPoints panel_points(const Panel& p, double area, const std::vector<TrianglePoint>& rule)
{
    PanelPoints out;
    out.x.reserve(rule.size());
    out.w.reserve(rule.size());
    out.phi.reserve(rule.size());
    for (const TrianglePoint& tp : rule) {
        const double l0 = 1.0 - tp.u - tp.v;
        out.x.push_back({l0 * p.v[0].x1 + tp.u * p.v[1].x1 + tp.v * p.v[2].x1,
                         l0 * p.v[0].x2 + tp.u * p.v[1].x2 + tp.v * p.v[2].x2});
        out.w.push_back(2.0 * area * tp.w);
        out.phi.push_back({l0, tp.u, tp.v});
    }
    return out;
}

inline LocalMatrix regular_pair(const PanelPoints& p1, const PanelPoints& p2)
{
    LocalMatrix L{};
    const std::size_t n1 = p1.x.size();
    const std::size_t n2 = p2.x.size();
    for (std::size_t i = 0; i < n1; ++i) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        const Point2 x = p1.x[i];
        for (std::size_t j = 0; j < n2; ++j) {
            const double dx = x.x1 - p2.x[j].x1;
            const double dy = x.x2 - p2.x[j].x2;
            const double k = p2.w[j] / std::sqrt(dx * dx + dy * dy);
            s0 += k * p2.phi[j][0];
            s1 += k * p2.phi[j][1];
            s2 += k * p2.phi[j][2];
        }
        const double wi = p1.w[i] * inv_four_pi;
        for (std::size_t a = 0; a < 3; ++a) {
            const double f = wi * p1.phi[i][a];
            L[a][0] += f * s0;
            L[a][1] += f * s1;
            L[a][2] += f * s2;
        }
    }
    return L;
}

inline LocalMatrix singular_pair(const Panel& t1, double area1, const Panel& t2, double area2,
                                 const PairClassification& c, const PairRule& rule)
{
    const Point2 a0 = t1.v[std::size_t(c.perm1[0])];
    const Point2 a1 = t1.v[std::size_t(c.perm1[1])];
    const Point2 a2 = t1.v[std::size_t(c.perm1[2])];
    const Point2 b0 = t2.v[std::size_t(c.perm2[0])];
    const Point2 b1 = t2.v[std::size_t(c.perm2[1])];
    const Point2 b2 = t2.v[std::size_t(c.perm2[2])];
    const double j1x = a1.x1 - a0.x1, j1y = a1.x2 - a0.x2, k1x = a2.x1 - a0.x1, k1y = a2.x2 - a0.x2;
    const double j2x = b1.x1 - b0.x1, j2y = b1.x2 - b0.x2, k2x = b2.x1 - b0.x1, k2y = b2.x2 - b0.x2;
    // offset between the two parametrizations' origins (zero when a vertex is shared)
    const double ox = a0.x1 - b0.x1, oy = a0.x2 - b0.x2;

    LocalMatrix P{};
    for (const PairPoint& p : rule) {
        const double dx = ox + p.u1 * j1x + p.v1 * k1x - p.u2 * j2x - p.v2 * k2x;
        const double dy = oy + p.u1 * j1y + p.v1 * k1y - p.u2 * j2y - p.v2 * k2y;
        const double k = p.w / std::sqrt(dx * dx + dy * dy);
        const double f1[3] = {1.0 - p.u1 - p.v1, p.u1, p.v1};
        const double f2[3] = {(1.0 - p.u2 - p.v2) * k, p.u2 * k, p.v2 * k};
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                P[a][b] += f1[a] * f2[b];
    }
    const double scale = 4.0 * area1 * area2 * inv_four_pi;
    LocalMatrix L{};
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            L[std::size_t(c.perm1[a])][std::size_t(c.perm2[b])] = scale * P[a][b];
    return L;
}

}  // namespace detail

/// All nine basis-pair integrals of a triangle pair.
inline LocalMatrix pair_matrix(const Panel& t1, const Panel& t2, const PairQuadrature& quad)
{
    const detail::PanelGeometry g1 = detail::panel_geometry(t1);
    const detail::PanelGeometry g2 = detail::panel_geometry(t2);
    const PairClassification c = classify_pair(t1.ids, t2.ids);
    if (c.cls != PairClass::separated)
        return detail::singular_pair(t1, g1.area, t2, g2.area, c, quad.singular(c.cls));
    const double gap = std::hypot(g1.centroid.x1 - g2.centroid.x1, g1.centroid.x2 - g2.centroid.x2) - g1.radius -
                       g2.radius;
    const auto& rule = gap > quad.options().far_ratio * std::max(g1.diameter, g2.diameter) ? quad.far_rule()
                                                                                           : quad.near_rule();
    return detail::regular_pair(detail::panel_points(t1, g1.area, rule), detail::panel_points(t2, g2.area, rule));
}

/// (1/4pi) int_T1 int_T2 phi_a(x) phi_b(y) / |x - y| for local vertices a, b.
inline double pair_integral(const Panel& t1, const Panel& t2, int a, int b, const BemOptions& opts = {})
{
    if (a < 0 || a > 2 || b < 0 || b > 2)
        throw DomainError("local basis index must be 0, 1 or 2");
    return pair_matrix(t1, t2, PairQuadrature(opts))[std::size_t(a)][std::size_t(b)];
}

/// Symmetric P1 energy matrix M_ij = (1/4pi) int int phi_i(x) phi_j(y)/|x-y|,
/// stored as its upper triangle.
class EnergyMatrix
{
public:
    explicit EnergyMatrix(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

    std::size_t dimension() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const noexcept
    {
        return i <= j ? data_[index(i, j)] : data_[index(j, i)];
    }

    /// c^T M c with compensated summation in a fixed order.
    double quadratic_form(const std::vector<double>& c) const
    {
        if (c.size() != n_)
            throw DomainError("vector size differs from matrix dimension");
        KahanSum diag;
        KahanSum off;
        for (std::size_t i = 0; i < n_; ++i) {
            const double* row = &data_[index(i, i)];
            diag += c[i] * c[i] * row[0];
            double partial = 0.0;
            for (std::size_t j = i + 1; j < n_; ++j)
                partial += row[j - i] * c[j];
            off += c[i] * partial;
        }
        return diag.value() + 2.0 * off.value();
    }

    std::vector<double> multiply(const std::vector<double>& c) const
    {
        if (c.size() != n_)
            throw DomainError("vector size differs from matrix dimension");
        std::vector<double> out(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const double* row = &data_[index(i, i)];
            out[i] += row[0] * c[i];
            for (std::size_t j = i + 1; j < n_; ++j) {
                out[i] += row[j - i] * c[j];
                out[j] += row[j - i] * c[i];
            }
        }
        return out;
    }

    std::vector<double> row_sums() const { return multiply(std::vector<double>(n_, 1.0)); }

    const std::vector<double>& packed() const noexcept { return data_; }

private:
    friend class EnergyMatrixBuilder;

    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * n_ - i * (i - 1) / 2 + (j - i); }

    std::size_t n_;
    std::vector<double> data_;
};

/// Accumulates triangle-pair contributions into an EnergyMatrix with
/// per-entry compensated summation.
class EnergyMatrixBuilder
{
public:
    explicit EnergyMatrixBuilder(std::size_t n) : m_(n), comp_(m_.data_.size(), 0.0) {}

    void add(std::size_t i, std::size_t j, double v) noexcept
    {
        const std::size_t k = i <= j ? m_.index(i, j) : m_.index(j, i);
        double& s = m_.data_[k];
        const double t = s + v;
        if (std::abs(s) >= std::abs(v))
            comp_[k] += (s - t) + v;
        else
            comp_[k] += (v - t) + s;
        s = t;
    }

    /// Adds the contribution of the unordered pair {t1, t2} (both orders).
    void add_pair(const Triangle& t1, const Triangle& t2, const LocalMatrix& L, bool identical) noexcept
    {
        if (identical) {
            for (std::size_t a = 0; a < 3; ++a) {
                add(t1[a], t1[a], L[a][a]);
                for (std::size_t b = a + 1; b < 3; ++b)
                    add(t1[a], t1[b], 0.5 * (L[a][b] + L[b][a]));
            }
            return;
        }
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) {
                if (t1[a] == t2[b])
                    add(t1[a], t2[b], 2.0 * L[a][b]);
                else
                    add(t1[a], t2[b], L[a][b]);
            }
    }

    EnergyMatrix finish() &&
    {
        for (std::size_t k = 0; k < comp_.size(); ++k)
            m_.data_[k] += comp_[k];
        return std::move(m_);
    }

private:
    EnergyMatrix m_;
    std::vector<double> comp_;
};

/// Galerkin matrix of the mesh.  Pair integrals are computed in blocks of
/// rows (optionally on several threads) and merged in ascending (t1, t2)
/// order, so the result does not depend on the worker count.
inline EnergyMatrix assemble(const TriangleMesh& mesh, const BemOptions& opts = {})
{
    validate(mesh);
    const PairQuadrature quad(opts);
    const std::size_t nt = mesh.triangles.size();

    std::vector<Panel> panels;
    std::vector<detail::PanelGeometry> geom;
    std::vector<detail::PanelPoints> near_pts, far_pts;
    panels.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        panels.push_back(panel_of(mesh, t));
        geom.push_back(detail::panel_geometry(panels.back()));
        near_pts.push_back(detail::panel_points(panels.back(), geom.back().area, quad.near_rule()));
        far_pts.push_back(detail::panel_points(panels.back(), geom.back().area, quad.far_rule()));
    }

    auto row = [&](std::size_t t1, std::vector<LocalMatrix>& out) {
        out.resize(nt - t1);
        for (std::size_t t2 = t1; t2 < nt; ++t2) {
            const PairClassification c = classify_pair(panels[t1].ids, panels[t2].ids);
            if (c.cls != PairClass::separated) {
                out[t2 - t1] = detail::singular_pair(panels[t1], geom[t1].area, panels[t2], geom[t2].area, c,
                                                     quad.singular(c.cls));
                continue;
            }
            const double gap = std::hypot(geom[t1].centroid.x1 - geom[t2].centroid.x1,
                                          geom[t1].centroid.x2 - geom[t2].centroid.x2) -
                               geom[t1].radius - geom[t2].radius;
            const bool far = gap > opts.far_ratio * std::max(geom[t1].diameter, geom[t2].diameter);
            out[t2 - t1] = far ? detail::regular_pair(far_pts[t1], far_pts[t2])
                               : detail::regular_pair(near_pts[t1], near_pts[t2]);
        }
    };

    EnergyMatrixBuilder builder(mesh.nodes.size());
    auto merge = [&](std::size_t t1, const std::vector<LocalMatrix>& out) {
        for (std::size_t t2 = t1; t2 < nt; ++t2)
            builder.add_pair(mesh.triangles[t1], mesh.triangles[t2], out[t2 - t1], t1 == t2);
    };

    const unsigned workers = std::max(1u, opts.workers);
    if (workers == 1) {
        std::vector<LocalMatrix> buffer;
        for (std::size_t t1 = 0; t1 < nt; ++t1) {
            row(t1, buffer);
            merge(t1, buffer);
        }
        return std::move(builder).finish();
    }

    const std::size_t block = std::size_t(workers) * 4;
    std::vector<std::vector<LocalMatrix>> buffers(block);
    for (std::size_t begin = 0; begin < nt; begin += block) {
        const std::size_t end = std::min(nt, begin + block);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    for (std::size_t t1 = begin + w; t1 < end; t1 += workers)
                        row(t1, buffers[t1 - begin]);
                });
        }
        for (std::size_t t1 = begin; t1 < end; ++t1)
            merge(t1, buffers[t1 - begin]);
    }
    return std::move(builder).finish();
}

/// Nodal interpolant of the density (exact for affine sigma).
inline std::vector<double> nodal_values(const TriangleMesh& mesh, const AffineDensity& d)
{
    std::vector<double> c;
    c.reserve(mesh.nodes.size());
    for (const Point2& p : mesh.nodes)
        c.push_back(d(mesh.ellipse, p));
    return c;
}

inline double bem_energy(const EnergyMatrix& m, const TriangleMesh& mesh, const AffineDensity& d)
{
    return m.quadratic_form(nodal_values(mesh, d));
}

inline double bem_energy(const TriangleMesh& mesh, const AffineDensity& d, const BemOptions& opts = {})
{
    return bem_energy(assemble(mesh, opts), mesh, d);
}

}  // namespace ellipstat
