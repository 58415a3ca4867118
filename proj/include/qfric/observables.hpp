#pragma once

// Thermodynamic observables of the steady state. Internal units (hbar = 1):
// powers in omega_sp^2, energies in omega_sp, forces in omega_sp / z_a.

#include <functional>
#include <optional>
#include <vector>

#include "qfric/kernels.hpp"
#include "qfric/polarizability.hpp"
#include "qfric/quadrature.hpp"

namespace qfric {

struct PowerReport
{
    double v = 0.0;
    double p_in = 0.0;
    double err_in = 0.0;
    double p_out = 0.0;
    double err_out = 0.0;
    double p_net = 0.0;
    double err_net = 0.0;
    double p_lte = 0.0;
    double err_lte = 0.0;
    double p_lte_asymptotic = 0.0;
};

struct FrictionReport
{
    double v = 0.0;
    double f_fric = 0.0;
    double err_f = 0.0;
    double p_rad = 0.0;
    double err_rad = 0.0;
    double p_ext = 0.0;       // -v F_fric
    double residual = 0.0;    // |P_rad - P_ext| / P_rad
    double interpolation_err = 0.0;  // relative, from the half-resolution table
    bool tabulated = true;    // false when S was evaluated directly
};

struct EnergyReport
{
    double v = 0.0;
    double total = 0.0;
    double err = 0.0;
    double zero_frequency = 0.0;      // spectral density at omega = 0
    double zero_frequency_lte = 0.0;  // same with the LTE-substituted spectrum
};

struct FdiSample
{
    double omega = 0.0;
    double v = 0.0;
    double ratio = 0.0;      // Tr nu / |Tr D|
    double asymptote = 0.0;  // max(1, 3 v / (pi z_a omega))
};

/// Frequencies where omega integrands have kinks or sharp features.
std::vector<double> frequency_breakpoints(Setup const& setup, double v);

/// int_0^inf f over the scenario's breakpoints, truncated at
/// omega_max = max(c omega_a, c omega_sp, 1e3 v / z_a) with a power-law tail
/// estimate; c = omega_cutoff. Throws ConvergenceError when the tail exceeds
/// the tolerance. f receives omega and the exact offset |omega| - omega_a.
IntegrationResult<double> frequency_integral(std::function<double(double, double)> const& f,
                                             Setup const& setup, double v);

/// P_in = (1/pi) int_0^inf omega Tr[nu alpha_Im] and P_out from the explicit
/// double integral (1/pi) int omega int dq/2pi Im r(omega + q v) Tr[M(q) Sigma].
/// With `model` = lte only the spectrum in P_out is replaced by
/// sgn(omega) alpha_Im; the imbalance is then P_LTE.
PowerReport power_balance(Setup const& setup, NoiseModel model = NoiseModel::exact);

/// Adds P_LTE = (1/pi) int omega Tr[(nu - D) alpha_Im] and its low-velocity asymptote.
PowerReport lte_power(Setup const& setup);

/// 45 v^4 alpha0_tilde^2 rho^2 / ((2 pi)^3 (2 z_a)^10), rho = Gamma / omega_p^2.
double lte_power_asymptote(Scenario const& s);

/// P_in - P_out without the cancellation of two O(1) integrals: both are
/// measured from the LTE output power. in_excess = P_in - P_out^LTE = P_LTE and
/// out_excess = P_out - P_out^LTE, the Doppler trace of alpha (nu - D) alpha^dagger
/// (zero for the LTE model). Resolves imbalances far below the rounding of P_in.
struct ResolvedBalance
{
    double v = 0.0;
    double in_excess = 0.0;
    double err_in = 0.0;
    double out_excess = 0.0;
    double err_out = 0.0;
    double imbalance = 0.0;
};
ResolvedBalance resolved_balance(Setup const& setup, NoiseModel model = NoiseModel::exact);

FdiSample fdi_ratio(double omega, double v, Setup const& setup);

/// (1/2pi) ((omega_a^2 + omega^2) / omega_a^2) Tr[Sigma] / alpha0_tilde.
double spectral_energy(double omega, double v, Setup const& setup,
                       NoiseModel model = NoiseModel::exact, std::optional<double> offset = {});

EnergyReport total_energy(Setup const& setup, NoiseModel model = NoiseModel::exact);

/// Born-Markov spectral density: a Lorentzian of half width gamma_a at omega_a
/// carrying weight d2 (the dipole variance).
double bm_spectral_energy(double omega, double gamma_a, double d2, Scenario const& s);

/// Born-Markov parameters matched to the dressed atom: d2 = 3 alpha0_tilde omega_a / 2
/// and gamma_a the mean dressed resonance width.
struct BornMarkovParams
{
    double gamma_a;
    double d2;
};
BornMarkovParams born_markov_params(Setup const& setup, double v);

/// Friction force and radiated power. S is tabulated on the Doppler window
/// |x| <= q_max |v| (grid_size points) unless a dressed resonance falls inside,
/// in which case it is evaluated directly.
FrictionReport friction(Setup const& setup);

}  // namespace qfric
