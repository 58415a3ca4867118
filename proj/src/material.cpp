#include "qfric/material.hpp"

#include <cmath>

#include "qfric/errors.hpp"

namespace qfric {

cplx epsilon(MaterialParams const& m, double omega)
{
    if (omega == 0.0) {
        throw DomainError("epsilon: Drude permittivity diverges at omega = 0");
    }
    return 1.0 - m.omega_p * m.omega_p / cplx(omega * omega, m.gamma_m * omega);
}

cplx r_tm(MaterialParams const& m, double omega)
{
    double const wsp2 = 0.5 * m.omega_p * m.omega_p;
    // (wsp - w)(wsp + w) keeps the real part accurate near the plasmon.
    double const wsp = std::sqrt(wsp2);
    double const re = (wsp - omega) * (wsp + omega);
    double const im = -m.gamma_m * omega;
    if (re == 0.0 && im == 0.0) {
        throw DomainError("r_tm: lossless surface-plasmon pole");
    }
    return wsp2 / cplx(re, im);
}

double im_r_tm(MaterialParams const& m, double omega)
{
    double const wsp2 = 0.5 * m.omega_p * m.omega_p;
    double const wsp = std::sqrt(wsp2);
    double const re = (wsp - omega) * (wsp + omega);
    double const gw = m.gamma_m * omega;
    double const den = re * re + gw * gw;
    if (den == 0.0) {
        if (omega == 0.0) {
            return 0.0;
        }
        throw DomainError("im_r_tm: lossless surface-plasmon pole");
    }
    return wsp2 * gw / den;
}

double resistivity_slope(MaterialParams const& m)
{
    return 2.0 * m.gamma_m / (m.omega_p * m.omega_p);
}

ReflectionSample reflection_sample(MaterialParams const& m, double omega)
{
    return {omega, r_tm(m, omega)};
}

}  // namespace qfric
