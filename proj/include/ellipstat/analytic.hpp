#pragma once

// Closed-form energies for affine densities on the elliptical disc.

#include <numbers>

#include "elliptic.hpp"
#include "geometry.hpp"

namespace ellipstat {

struct EnergyBreakdown
{
    double i_sigma0 = 0.0;  // sigma = 1
    double i_sigma1 = 0.0;  // sigma = x1/a
    double i_sigma2 = 0.0;  // sigma = x2/b
    double total = 0.0;
};

/// (8 / 3 pi) a b^2 K(eps).
inline double i_sigma0(const Ellipse& e)
{
    return 8.0 / (3.0 * std::numbers::pi) * e.a() * e.b() * e.b() * complete_K(e.eccentricity());
}

/// (8 / 15 pi) a b^2 (K - E)/eps^2.
inline double i_sigma1(const Ellipse& e)
{
    return 8.0 / (15.0 * std::numbers::pi) * e.a() * e.b() * e.b() * k_minus_e_over_eps2(e.eccentricity());
}

/// (8 / 15 pi) a b^2 (K - (K - E)/eps^2).
inline double i_sigma2(const Ellipse& e)
{
    const double eps = e.eccentricity();
    return 8.0 / (15.0 * std::numbers::pi) * e.a() * e.b() * e.b() * (complete_K(eps) - k_minus_e_over_eps2(eps));
}

/// Energy of sigma = alpha0 + alpha1 x1/a + alpha2 x2/b.  The mixed terms
/// vanish by symmetry, so total = sum alpha_i^2 I_i; total itself is
/// evaluated from the combined bracket
///   8ab^2/(15 pi) [(5 alpha0^2 + alpha2^2) K + (alpha1^2 - alpha2^2)(K - E)/eps^2].
inline EnergyBreakdown theorem1_energy(const Ellipse& e, const AffineDensity& d)
{
    const double eps = e.eccentricity();
    const double k = complete_K(eps);
    const double kme = k_minus_e_over_eps2(eps);
    const double a0 = d.alpha0 * d.alpha0;
    const double a1 = d.alpha1 * d.alpha1;
    const double a2 = d.alpha2 * d.alpha2;

    EnergyBreakdown out;
    out.i_sigma0 = i_sigma0(e);
    out.i_sigma1 = i_sigma1(e);
    out.i_sigma2 = i_sigma2(e);
    out.total = 8.0 * e.a() * e.b() * e.b() / (15.0 * std::numbers::pi) *
                ((5.0 * a0 + a2) * k + (a1 - a2) * kme);
    return out;
}

inline double analytic_energy(const Ellipse& e, const AffineDensity& d) { return theorem1_energy(e, d).total; }

}  // namespace ellipstat
