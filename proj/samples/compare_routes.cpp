// Energy of sigma = 3 + x1 + 2 x2 on the ellipse a = 1.2, b = 0.5 by the
// closed form, the spectral series and a level-3 BEM mesh.

#include <cstdio>

#include "ellipstat/ellipstat.hpp"

int main()
{
    using namespace ellipstat;

    const Ellipse e(1.2, 0.5);
    const AffineDensity d = MonomialDensity{3.0, 1.0, 2.0}.normalized(e);

    const double exact = analytic_energy(e, d);
    const double series = spectral_energy(e, d, 30);
    const double bem = bem_energy(generate(e, 3), d);

    std::printf("analytic  %.12f\n", exact);
    std::printf("spectral  %.12f  (rel. err %.2e)\n", series, std::abs(series - exact) / exact);
    std::printf("bem L3    %.12f  (rel. err %.2e)\n", bem, std::abs(bem - exact) / exact);
}
