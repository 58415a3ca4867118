#pragma once

#include "qfric/dyad.hpp"
#include "qfric/units.hpp"

namespace qfric {

struct ReflectionSample
{
    double omega;
    cplx value;
};

/// Drude permittivity 1 - omega_p^2 / (omega^2 + i Gamma omega). Throws at omega = 0.
cplx epsilon(MaterialParams const& m, double omega);

/// Near-field TM reflection coefficient in plasmon-pole form,
/// omega_sp^2 / (omega_sp^2 - omega^2 - i Gamma omega).
cplx r_tm(MaterialParams const& m, double omega);

/// Im r_tm(omega), evaluated without complex division. Odd in omega.
double im_r_tm(MaterialParams const& m, double omega);

/// Low-frequency slope of Im r_tm: 2 eps0 rho = Gamma / omega_sp^2.
double resistivity_slope(MaterialParams const& m);

ReflectionSample reflection_sample(MaterialParams const& m, double omega);

}  // namespace qfric
