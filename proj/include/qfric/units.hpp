#pragma once

// Parameters and the dimensionless unit system.
//
// Internally hbar = eps0 = 1, lengths are measured in z_a and frequencies in
// the surface-plasmon frequency omega_sp. SI values appear only at the
// boundary (config files, CSV output).

#include <cstdint>
#include <string>

namespace qfric {

namespace si {
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double eps0 = 8.8541878128e-12;      // F / m
inline constexpr double c = 299792458.0;              // m / s
}  // namespace si

/// Drude metal. Both frequencies in the caller's frequency unit.
struct MaterialParams
{
    double omega_p = 0.0;  // plasma frequency
    double gamma_m = 0.0;  // Drude damping

    /// Validated construction: omega_p > 0, gamma_m > 0.
    static MaterialParams make(double omega_p, double gamma_m);

    void validate() const;
    double omega_sp() const;
    /// eps0 * rho = gamma_m / omega_p^2 (eps0 = 1 internally).
    double resistivity() const;
};

/// omega_p / sqrt(2)
double omega_sp(MaterialParams const& m);

struct NumericsConfig
{
    double rel_tol_quad = 1e-10;
    double q_cutoff = 40.0;      // in units of 1 / (2 z_a)
    double omega_cutoff = 10.0;  // multiple of max(omega_a, omega_sp) kept before the tail
    int grid_size = 2049;        // points of cached spectral tables
    double psd_tol = 1e-10;
    double alpha_warn = 0.1;     // weak-coupling warning threshold on alpha0_tilde
    std::uint64_t seed = 20201;

    void validate() const;
};

/// Fully dimensionless scenario.
struct Scenario
{
    double omega_a = 0.0;
    double alpha0_tilde = 0.0;  // alpha0 / (eps0 L^3), L the length unit (= z_a from to_internal)
    double z_a = 1.0;
    double v = 0.0;             // signed; |v| is the speed
    MaterialParams material;
    NumericsConfig numerics;

    void validate() const;
    bool weak_coupling() const { return alpha0_tilde <= numerics.alpha_warn; }

    /// |q| range kept in wavevector integrals: q_cutoff / (2 z_a).
    double q_max() const { return numerics.q_cutoff / (2.0 * z_a); }

    Scenario with_velocity(double new_v) const;
    Scenario with_alpha0_tilde(double a) const;

    std::string describe() const;
};

/// SI parameter set as read from a configuration file.
struct SiParameters
{
    double omega_p_si = 0.0;  // rad / s
    double gamma_si = 0.0;    // rad / s
    double omega_a_si = 0.0;  // rad / s
    double alpha0_si = 0.0;   // C m^2 / V
    double za_si = 0.0;       // m
    double v_over_c = 0.0;
};

/// Conversion factors from internal to SI units.
struct UnitScales
{
    double length = 1.0;     // m, = z_a
    double frequency = 1.0;  // rad / s, = omega_sp

    double velocity() const { return length * frequency; }
    double energy() const { return si::hbar * frequency; }
    double power() const { return si::hbar * frequency * frequency; }
    double force() const { return si::hbar * frequency / length; }
    /// Energy per unit angular frequency.
    double spectral_energy() const { return si::hbar; }
};

struct InternalModel
{
    Scenario scenario;
    UnitScales scales;
};

InternalModel to_internal(SiParameters const& p, NumericsConfig const& numerics = {});
SiParameters to_si(Scenario const& s, UnitScales const& scales);

}  // namespace qfric
