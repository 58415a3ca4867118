#pragma once

#include <optional>
#include <vector>

#include "qfric/dyad.hpp"
#include "qfric/kernels.hpp"

namespace qfric {

/// alpha_B = alpha0_tilde omega_a^2 / (omega_a^2 - omega^2). Throws DomainError at |omega| = omega_a.
double alpha_bare(double omega, Scenario const& s);

struct DressedAlpha
{
    double omega = 0.0;
    double v = 0.0;
    Dyad value = Dyad::Zero();
    Dyad alpha_im = Dyad::Zero();  // alpha D alpha^dagger
    double condition = 1.0;
};

/// alpha = alpha_B [1 - alpha_B Delta]^-1, evaluated as K^-1 with
/// K = (omega_a^2 - omega^2) / (alpha0_tilde omega_a^2) - Delta so the bare
/// pole never appears. Throws SingularityError when cond(K) > 1e12.
/// `offset` = |omega| - omega_a, when given, is used for the detuning instead
/// of the rounded difference; resonances narrower than the spacing of doubles
/// near omega_a need it.
DressedAlpha alpha_dressed(double omega, double v, Setup const& setup,
                           std::optional<double> offset = {});
DressedAlpha alpha_dressed(double omega, double v, Scenario const& s, Dyad const& delta,
                           std::optional<double> offset = {});

enum class NoiseModel
{
    exact,  // nu(omega, v)
    lte,    // sgn(omega) D(omega, v): local thermal equilibrium
};

struct PowerSpectrumDyad
{
    double omega = 0.0;
    double v = 0.0;
    Dyad sigma = Dyad::Zero();  // alpha nu alpha^dagger, symmetric ordered
    Dyad s = Dyad::Zero();      // alpha (nu + D) alpha^dagger, one sided
    DressedAlpha alpha;
};

PowerSpectrumDyad sigma_spectrum(double omega, double v, Setup const& setup,
                                 NoiseModel model = NoiseModel::exact,
                                 std::optional<double> offset = {});

/// Resonance of the dressed polarizability near omega_a: center and half width.
struct Resonance
{
    double omega;
    double width;
    double shift;  // omega - omega_a without cancellation
};

/// Positive-frequency resonances, one per eigenchannel of the Hermitian part of Delta.
std::vector<Resonance> dressed_resonances(double v, Setup const& setup);

}  // namespace qfric
