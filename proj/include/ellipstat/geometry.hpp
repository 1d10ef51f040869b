#pragma once

// Ellipse, affine charge densities and the spheroidal parametrization of the
// disc by the upper unit half-sphere.

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace ellipstat {

struct Point2
{
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Elliptical disc x1^2/a^2 + x2^2/b^2 < 1 with the major axis along x1.
/// a == b is admitted (circle).
class Ellipse
{
public:
    Ellipse(double a, double b) : a_(a), b_(b)
    {
        if (!(std::isfinite(a) && std::isfinite(b)) || !(b > 0.0) || a < b)
            throw DomainError("ellipse requires a >= b > 0");
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    /// sqrt(1 - b^2/a^2), in [0, 1).
    double eccentricity() const noexcept
    {
        const double r = b_ / a_;
        return std::sqrt((1.0 - r) * (1.0 + r));
    }

    double area() const noexcept { return std::numbers::pi * a_ * b_; }

    /// x1^2/a^2 + x2^2/b^2, equal to 1 on the rim.
    double level(Point2 p) const noexcept
    {
        const double u = p.x1 / a_;
        const double v = p.x2 / b_;
        return u * u + v * v;
    }

    Ellipse scaled(double lambda) const { return {lambda * a_, lambda * b_}; }

    friend bool operator==(const Ellipse&, const Ellipse&) = default;

private:
    double a_;
    double b_;
};

inline double eccentricity(const Ellipse& e) noexcept { return e.eccentricity(); }

/// sigma(x) = alpha0 + alpha1 * x1/a + alpha2 * x2/b (normalized convention).
struct AffineDensity
{
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;

    AffineDensity() = default;
    AffineDensity(double c0, double c1, double c2) : alpha0(c0), alpha1(c1), alpha2(c2)
    {
        if (!(std::isfinite(c0) && std::isfinite(c1) && std::isfinite(c2)))
            throw DomainError("density coefficients must be finite");
    }

    double operator()(const Ellipse& e, Point2 p) const noexcept
    {
        return alpha0 + alpha1 * p.x1 / e.a() + alpha2 * p.x2 / e.b();
    }

    friend bool operator==(const AffineDensity&, const AffineDensity&) = default;
};

/// sigma(x) = c0 + c1 * x1 + c2 * x2 (monomial convention).
struct MonomialDensity
{
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    AffineDensity normalized(const Ellipse& e) const { return {c0, c1 * e.a(), c2 * e.b()}; }

    double operator()(Point2 p) const noexcept { return c0 + c1 * p.x1 + c2 * p.x2; }
};

enum class DensityConvention { normalized, monomial };

inline std::string to_string(DensityConvention c)
{
    return c == DensityConvention::normalized ? "normalized" : "monomial";
}

/// theta in [0, pi/2] (pole at the disc centre), phi in [0, 2 pi).
struct SpheroidalPoint
{
    double theta = 0.0;
    double phi = 0.0;
};

inline Point2 spheroidal_to_cartesian(const Ellipse& e, SpheroidalPoint p) noexcept
{
    const double s = std::sin(p.theta);
    return {e.a() * s * std::cos(p.phi), e.b() * s * std::sin(p.phi)};
}

/// g(theta, phi) = sigma(theta, phi) cos(theta).
inline double density_on_sphere(const Ellipse& e, const AffineDensity& d, SpheroidalPoint p) noexcept
{
    return d(e, spheroidal_to_cartesian(e, p)) * std::cos(p.theta);
}

}  // namespace ellipstat
