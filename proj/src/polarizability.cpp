#include "qfric/polarizability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfric/errors.hpp"

namespace qfric {

namespace {

constexpr double kMaxCondition = 1e12;

}  // namespace

double alpha_bare(double omega, Scenario const& s)
{
    double const wa = s.omega_a;
    double const den = (wa - omega) * (wa + omega);
    if (den == 0.0) {
        throw DomainError("alpha_bare: pole at |omega| = omega_a");
    }
    return s.alpha0_tilde * wa * wa / den;
}

DressedAlpha alpha_dressed(double omega, double v, Scenario const& s, Dyad const& delta,
                           std::optional<double> offset)
{
    double const wa = s.omega_a;
    double const o = offset ? *offset : std::abs(omega) - wa;
    double const c = -o * (2.0 * wa + o) / (s.alpha0_tilde * wa * wa);
    Dyad const k = c * Dyad::Identity() - delta;
    DressedAlpha out;
    out.omega = omega;
    out.v = v;
    out.condition = condition_number(k);
    if (!(out.condition <= kMaxCondition)) {
        throw SingularityError("alpha_dressed: near-singular inverse (condition "
                                   + std::to_string(out.condition) + ")",
                               out.condition);
    }
    out.value = k.partialPivLu().inverse();
    Dyad const d = anti_hermitian_part(delta);
    out.alpha_im = out.value * d * out.value.adjoint();
    out.alpha_im = hermitian_part(out.alpha_im);
    return out;
}

DressedAlpha alpha_dressed(double omega, double v, Setup const& setup,
                           std::optional<double> offset)
{
    return alpha_dressed(omega, v, setup.scenario, level_shift(omega, v, setup).value, offset);
}

PowerSpectrumDyad sigma_spectrum(double omega, double v, Setup const& setup, NoiseModel model,
                                 std::optional<double> offset)
{
    PowerSpectrumDyad out;
    out.omega = omega;
    out.v = v;
    Dyad const delta = level_shift(omega, v, setup).value;
    out.alpha = alpha_dressed(omega, v, setup.scenario, delta, offset);
    Dyad const& a = out.alpha.value;
    if (model == NoiseModel::lte) {
        double const sg = omega > 0 ? 1.0 : (omega < 0 ? -1.0 : 0.0);
        out.sigma = sg * out.alpha.alpha_im;
        out.s = omega > 0 ? Dyad(2.0 * out.alpha.alpha_im) : Dyad(Dyad::Zero());
        return out;
    }
    Dyad const nu = noise_kernel(omega, v, setup).value;
    Dyad const nu_plus = one_sided_kernel(omega, v, setup, +1).value;
    out.sigma = hermitian_part(a * nu * a.adjoint());
    out.s = hermitian_part(a * nu_plus * a.adjoint());
    return out;
}

std::vector<Resonance> dressed_resonances(double v, Setup const& setup)
{
    Scenario const& s = setup.scenario;
    double const wa = s.omega_a;
    std::vector<Resonance> out;
    for (int j = 0; j < 3; ++j) {
        double w = wa;
        double width = 0.0;
        double shift = 0.0;
        for (int it = 0; it < 60; ++it) {
            Dyad const delta = level_shift(w, v, setup).value;
            Eigen::SelfAdjointEigenSolver<Dyad> es(hermitian_part(delta));
            double const lambda = es.eigenvalues()[j];
            Dyad const d = anti_hermitian_part(delta);
            auto const u = es.eigenvectors().col(j);
            double const dj = (u.adjoint() * d * u)(0, 0).real();
            double const arg = 1.0 - s.alpha0_tilde * lambda;
            if (!(arg > 0.0)) {
                break;  // strong coupling: no resonance near omega_a on this channel
            }
            double const next = wa * std::sqrt(arg);
            double const x = s.alpha0_tilde * lambda;
            shift = -wa * x / (std::sqrt(arg) + 1.0);
            width = std::abs(s.alpha0_tilde * wa * wa * dj / (2.0 * next));
            bool const done = std::abs(next - w) <= 1e-15 * wa;
            w = next;
            if (done) {
                break;
            }
        }
        out.push_back({w, width, shift});
    }
    std::sort(out.begin(), out.end(),
              [](Resonance const& a, Resonance const& b) { return a.omega < b.omega; });
    return out;
}

}  // namespace qfric
