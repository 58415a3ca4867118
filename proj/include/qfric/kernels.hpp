#pragma once

// Velocity-dependent kernels as wavevector integrals over Doppler-shifted
// Green tensors, omega_q = omega + q v:
//
//   D(omega, v)     = int dq/2pi  Im r(omega_q) M(q)          dissipation, omega * gamma
//   nu(omega, v)    = int dq/2pi |Im r(omega_q)| M(q)         noise spectrum
//   nu_theta^{+-}   = int dq/pi  theta(+-omega_q) |Im r| M    = nu +- D
//   Delta(omega, v) = int dq/2pi  r(omega_q) M(q)             complex, anti-Hermitian part D
//
// Im r is odd in frequency, which is the odd extension of G_Im to negative
// frequencies. The q range is |q| <= q_cutoff / (2 z_a). Integrals are folded
// onto q >= 0 with M(-q) = M(q)^T, so the near-cancelling parts at small
// omega are formed pointwise rather than by the quadrature.

#include <memory>

#include "qfric/dyad.hpp"
#include "qfric/geometric_dyad.hpp"
#include "qfric/units.hpp"

namespace qfric {

/// Scenario plus the geometric-dyad table its kernels read.
struct Setup
{
    Scenario scenario;
    std::shared_ptr<GeometricDyadTable const> table;

    /// Validates the scenario and fetches (or builds) the table.
    static Setup make(Scenario const& s);
};

/// Process-wide table cache keyed by (z_a, q_max). Thread-safe.
std::shared_ptr<GeometricDyadTable const> shared_geometric_table(double za, double q_max);

struct KernelSample
{
    double omega = 0.0;
    double v = 0.0;
    Dyad value = Dyad::Zero();
    double err = 0.0;  // absolute, Frobenius norm
};

KernelSample noise_kernel(double omega, double v, Setup const& setup);
KernelSample dissipation_kernel(double omega, double v, Setup const& setup);
/// sign = +1: nu + D (the one-sided kernel); sign = -1: nu - D.
KernelSample one_sided_kernel(double omega, double v, Setup const& setup, int sign = +1);
KernelSample level_shift(double omega, double v, Setup const& setup);

/// All kernels at one point. nu_minus = nu - D, nu_plus = nu + D.
struct KernelSet
{
    KernelSample delta;
    KernelSample nu;
    KernelSample nu_plus;
    KernelSample nu_minus;

    Dyad dissipation() const { return anti_hermitian_part(delta.value); }
};

KernelSet kernel_set(double omega, double v, Setup const& setup);

}  // namespace qfric
