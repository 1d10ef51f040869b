#pragma once

// Structured triangulations of the elliptical disc and their text format:
//
//   ellipse <a> <b>
//   vertices <N>
//   <x1> <x2>            (N lines, 17 significant digits)
//   triangles <M>
//   <i> <j> <k>          (M lines, zero-based, counterclockwise)
//   boundary <K>
//   <i>                  (K lines)

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace ellipstat {

using Triangle = std::array<std::uint32_t, 3>;

struct TriangleMesh
{
    Ellipse ellipse{1.0, 1.0};
    std::vector<Point2> nodes;
    std::vector<Triangle> triangles;
    std::vector<std::uint8_t> boundary_mask;
    // unknown for meshes read from a file
    std::optional<int> refinement;

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t triangle_count() const noexcept { return triangles.size(); }

    std::size_t boundary_count() const noexcept
    {
        return std::size_t(std::count(boundary_mask.begin(), boundary_mask.end(), std::uint8_t{1}));
    }

    friend bool operator==(const TriangleMesh& l, const TriangleMesh& r)
    {
        return l.ellipse == r.ellipse && l.nodes == r.nodes && l.triangles == r.triangles &&
               l.boundary_mask == r.boundary_mask;
    }
};

/// Twice the signed area of (p, q, r); positive when counterclockwise.
inline double signed_area2(Point2 p, Point2 q, Point2 r) noexcept
{
    return (q.x1 - p.x1) * (r.x2 - p.x2) - (q.x2 - p.x2) * (r.x1 - p.x1);
}

inline double triangle_area(const TriangleMesh& m, const Triangle& t) noexcept
{
    return 0.5 * signed_area2(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
}

inline double mesh_area(const TriangleMesh& m) noexcept
{
    double sum = 0.0;
    for (const Triangle& t : m.triangles)
        sum += triangle_area(m, t);
    return sum;
}

inline double max_edge_length(const TriangleMesh& m) noexcept
{
    double h = 0.0;
    for (const Triangle& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            const Point2 p = m.nodes[t[std::size_t(k)]];
            const Point2 q = m.nodes[t[std::size_t((k + 1) % 3)]];
            h = std::max(h, std::hypot(q.x1 - p.x1, q.x2 - p.x2));
        }
    return h;
}

/// Smallest interior angle over all triangles, in degrees.
inline double min_angle_degrees(const TriangleMesh& m) noexcept
{
    double best = 180.0;
    for (const Triangle& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            const Point2 p = m.nodes[t[std::size_t(k)]];
            const Point2 q = m.nodes[t[std::size_t((k + 1) % 3)]];
            const Point2 r = m.nodes[t[std::size_t((k + 2) % 3)]];
            const double ux = q.x1 - p.x1, uy = q.x2 - p.x2;
            const double vx = r.x1 - p.x1, vy = r.x2 - p.x2;
            const double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
            best = std::min(best, ang * 180.0 / std::numbers::pi);
        }
    return best;
}

/// Checks indices, orientation and the boundary mask size.
inline void validate(const TriangleMesh& m)
{
    const std::size_t n = m.nodes.size();
    if (m.boundary_mask.size() != n)
        throw ValidationError("boundary mask size differs from node count");
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
        const Triangle& t = m.triangles[i];
        for (std::uint32_t v : t)
            if (v >= n)
                throw ValidationError("triangle " + std::to_string(i) + " references node " + std::to_string(v) +
                                      " but the mesh has " + std::to_string(n) + " nodes");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw ValidationError("triangle " + std::to_string(i) + " repeats a node");
        if (!(signed_area2(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]) > 0.0))
            throw OrientationError("triangle " + std::to_string(i) + " is not counterclockwise with positive area");
    }
}

/// Level 0 is a fan of 8 triangles around the centre; every level splits each
/// triangle into four by edge bisection, pushing new rim nodes radially onto
/// the unit circle.  The unit-disc mesh is finally scaled by (a, b).
inline TriangleMesh generate(const Ellipse& e, int level)
{
    if (level < 0)
        throw DomainError("refinement level must be non-negative");

    std::vector<Point2> pts;
    std::vector<std::uint8_t> rim;
    std::vector<Triangle> tris;

    pts.push_back({0.0, 0.0});
    rim.push_back(0);
    for (int k = 0; k < 8; ++k) {
        const double ang = k * std::numbers::pi / 4.0;
        pts.push_back({std::cos(ang), std::sin(ang)});
        rim.push_back(1);
    }
    // exact values on the axes
    pts[3] = {0.0, 1.0};
    pts[5] = {-1.0, 0.0};
    pts[7] = {0.0, -1.0};
    for (std::uint32_t k = 0; k < 8; ++k)
        tris.push_back({0, 1 + k, 1 + (k + 1) % 8});

    for (int l = 0; l < level; ++l) {
        // edges used by exactly one triangle lie on the rim
        std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
        auto key = [](std::uint32_t i, std::uint32_t j) { return std::make_pair(std::min(i, j), std::max(i, j)); };
        for (const Triangle& t : tris)
            for (int k = 0; k < 3; ++k)
                ++edge_use[key(t[std::size_t(k)], t[std::size_t((k + 1) % 3)])];

        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t i, std::uint32_t j) {
            const auto k = key(i, j);
            if (auto it = midpoint.find(k); it != midpoint.end())
                return it->second;
            Point2 p{0.5 * (pts[i].x1 + pts[j].x1), 0.5 * (pts[i].x2 + pts[j].x2)};
            const bool on_rim = edge_use[k] == 1;
            if (on_rim) {
                const double r = std::hypot(p.x1, p.x2);
                p = {p.x1 / r, p.x2 / r};
            }
            const auto idx = std::uint32_t(pts.size());
            pts.push_back(p);
            rim.push_back(on_rim ? 1 : 0);
            midpoint.emplace(k, idx);
            return idx;
        };

        std::vector<Triangle> next;
        next.reserve(tris.size() * 4);
        for (const Triangle& t : tris) {
            const std::uint32_t m01 = mid(t[0], t[1]);
            const std::uint32_t m12 = mid(t[1], t[2]);
            const std::uint32_t m20 = mid(t[2], t[0]);
            next.push_back({t[0], m01, m20});
            next.push_back({m01, t[1], m12});
            next.push_back({m20, m12, t[2]});
            next.push_back({m01, m12, m20});
        }
        tris = std::move(next);
    }

    TriangleMesh mesh;
    mesh.ellipse = e;
    mesh.nodes.reserve(pts.size());
    for (const Point2& p : pts)
        mesh.nodes.push_back({e.a() * p.x1, e.b() * p.x2});
    mesh.triangles = std::move(tris);
    mesh.boundary_mask = std::move(rim);
    mesh.refinement = level;
    return mesh;
}

namespace detail {

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_mesh(const TriangleMesh& m, std::ostream& out)
{
    out << "ellipse " << detail::format_double(m.ellipse.a()) << ' ' << detail::format_double(m.ellipse.b()) << '\n';
    out << "vertices " << m.nodes.size() << '\n';
    for (const Point2& p : m.nodes)
        out << detail::format_double(p.x1) << ' ' << detail::format_double(p.x2) << '\n';
    out << "triangles " << m.triangles.size() << '\n';
    for (const Triangle& t : m.triangles)
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "boundary " << m.boundary_count() << '\n';
    for (std::size_t i = 0; i < m.boundary_mask.size(); ++i)
        if (m.boundary_mask[i])
            out << i << '\n';
}

namespace detail {

class LineReader
{
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::vector<std::string> next(const char* what)
    {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            std::istringstream ss(line);
            std::vector<std::string> tokens;
            for (std::string tok; ss >> tok;)
                tokens.push_back(tok);
            if (!tokens.empty())
                return tokens;
        }
        throw ParseError(line_no_ + 1, std::string("unexpected end of file, expected ") + what);
    }

    std::size_t line() const noexcept { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

inline double parse_double(const std::string& s, std::size_t line)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError(line, "invalid number '" + s + "'");
    return v;
}

inline std::uint64_t parse_index(const std::string& s, std::size_t line)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(line, "invalid index '" + s + "'");
    return v;
}

inline std::vector<std::string> expect_header(LineReader& r, const char* keyword, std::size_t values)
{
    auto tok = r.next(keyword);
    if (tok[0] != keyword || tok.size() != values + 1)
        throw ParseError(r.line(), std::string("expected '") + keyword + "' header");
    return tok;
}

}  // namespace detail

/// Parses the mesh text format and validates the result.
inline TriangleMesh read_mesh(std::istream& in)
{
    detail::LineReader reader(in);

    const auto head = detail::expect_header(reader, "ellipse", 2);
    const double a = detail::parse_double(head[1], reader.line());
    const double b = detail::parse_double(head[2], reader.line());
    TriangleMesh m;
    try {
        m.ellipse = Ellipse(a, b);
    } catch (const DomainError& err) {
        throw ParseError(reader.line(), err.what());
    }

    const auto vh = detail::expect_header(reader, "vertices", 1);
    const std::uint64_t n_vertices = detail::parse_index(vh[1], reader.line());
    m.nodes.reserve(std::size_t(std::min<std::uint64_t>(n_vertices, 1u << 20)));
    for (std::uint64_t i = 0; i < n_vertices; ++i) {
        const auto tok = reader.next("vertex coordinates");
        if (tok.size() != 2)
            throw ParseError(reader.line(), "expected two coordinates");
        m.nodes.push_back({detail::parse_double(tok[0], reader.line()), detail::parse_double(tok[1], reader.line())});
    }

    const auto th = detail::expect_header(reader, "triangles", 1);
    const std::uint64_t n_triangles = detail::parse_index(th[1], reader.line());
    m.triangles.reserve(std::size_t(std::min<std::uint64_t>(n_triangles, 1u << 20)));
    for (std::uint64_t i = 0; i < n_triangles; ++i) {
        const auto tok = reader.next("triangle indices");
        if (tok.size() != 3)
            throw ParseError(reader.line(), "expected three node indices");
        Triangle t{};
        for (std::size_t k = 0; k < 3; ++k) {
            const std::uint64_t v = detail::parse_index(tok[k], reader.line());
            if (v >= n_vertices)
                throw ValidationError("line " + std::to_string(reader.line()) + ": node index " + std::to_string(v) +
                                      " out of range (" + std::to_string(n_vertices) + " nodes)");
            t[k] = std::uint32_t(v);
        }
        m.triangles.push_back(t);
    }

    const auto bh = detail::expect_header(reader, "boundary", 1);
    const std::uint64_t n_boundary = detail::parse_index(bh[1], reader.line());
    m.boundary_mask.assign(std::size_t(n_vertices), 0);
    for (std::uint64_t i = 0; i < n_boundary; ++i) {
        const auto tok = reader.next("boundary node index");
        if (tok.size() != 1)
            throw ParseError(reader.line(), "expected one node index");
        const std::uint64_t v = detail::parse_index(tok[0], reader.line());
        if (v >= n_vertices)
            throw ValidationError("line " + std::to_string(reader.line()) + ": boundary index " + std::to_string(v) +
                                  " out of range");
        m.boundary_mask[std::size_t(v)] = 1;
    }

    validate(m);
    return m;
}

}  // namespace ellipstat
