#include "qfric/units.hpp"

#include <cmath>
#include <sstream>

#include "qfric/errors.hpp"

namespace qfric {

namespace {

void require_positive(double x, char const* name)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValidationError(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

MaterialParams MaterialParams::make(double omega_p, double gamma_m)
{
    MaterialParams m{omega_p, gamma_m};
    m.validate();
    return m;
}

void MaterialParams::validate() const
{
    require_positive(omega_p, "material.omega_p");
    require_positive(gamma_m, "material.gamma");
}

double MaterialParams::omega_sp() const
{
    return omega_p / std::sqrt(2.0);
}

double MaterialParams::resistivity() const
{
    return gamma_m / (omega_p * omega_p);
}

double omega_sp(MaterialParams const& m)
{
    return m.omega_sp();
}

void NumericsConfig::validate() const
{
    require_positive(rel_tol_quad, "numerics.rel_tol_quad");
    require_positive(q_cutoff, "numerics.q_cutoff");
    require_positive(omega_cutoff, "numerics.omega_cutoff");
    require_positive(psd_tol, "numerics.psd_tol");
    require_positive(alpha_warn, "numerics.alpha_warn");
    if (grid_size < 8) {
        throw ValidationError("numerics.grid_size must be at least 8");
    }
}

void Scenario::validate() const
{
    require_positive(omega_a, "atom.omega_a");
    require_positive(alpha0_tilde, "atom.alpha0");
    require_positive(z_a, "geometry.za");
    if (!std::isfinite(v)) {
        throw ValidationError("motion.v must be finite");
    }
    material.validate();
    numerics.validate();
}

Scenario Scenario::with_velocity(double new_v) const
{
    Scenario s = *this;
    s.v = new_v;
    return s;
}

Scenario Scenario::with_alpha0_tilde(double a) const
{
    Scenario s = *this;
    s.alpha0_tilde = a;
    return s;
}

std::string Scenario::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << "omega_a=" << omega_a << " alpha0_tilde=" << alpha0_tilde << " z_a=" << z_a
       << " v=" << v << " omega_p=" << material.omega_p << " gamma=" << material.gamma_m
       << " rel_tol_quad=" << numerics.rel_tol_quad << " q_cutoff=" << numerics.q_cutoff
       << " omega_cutoff=" << numerics.omega_cutoff << " grid_size=" << numerics.grid_size
       << " psd_tol=" << numerics.psd_tol << " seed=" << numerics.seed;
    return os.str();
}

InternalModel to_internal(SiParameters const& p, NumericsConfig const& numerics)
{
    require_positive(p.omega_p_si, "material.omega_p_si");
    require_positive(p.gamma_si, "material.gamma_si");
    require_positive(p.omega_a_si, "atom.omega_a_si");
    require_positive(p.alpha0_si, "atom.alpha0_si");
    require_positive(p.za_si, "geometry.za_si");
    if (!std::isfinite(p.v_over_c) || std::abs(p.v_over_c) >= 1.0) {
        throw ValidationError("motion.v_over_c must satisfy |v| < c");
    }

    UnitScales scales;
    scales.length = p.za_si;
    scales.frequency = p.omega_p_si / std::sqrt(2.0);

    Scenario s;
    s.omega_a = p.omega_a_si / scales.frequency;
    s.alpha0_tilde = p.alpha0_si / (si::eps0 * p.za_si * p.za_si * p.za_si);
    s.z_a = 1.0;
    s.v = p.v_over_c * si::c / scales.velocity();
    s.material.omega_p = p.omega_p_si / scales.frequency;
    s.material.gamma_m = p.gamma_si / scales.frequency;
    s.numerics = numerics;
    s.validate();
    return {s, scales};
}

SiParameters to_si(Scenario const& s, UnitScales const& scales)
{
    SiParameters p;
    double const unit = scales.length;
    double const len = s.z_a * unit;
    p.omega_p_si = s.material.omega_p * scales.frequency;
    p.gamma_si = s.material.gamma_m * scales.frequency;
    p.omega_a_si = s.omega_a * scales.frequency;
    p.alpha0_si = s.alpha0_tilde * si::eps0 * unit * unit * unit;
    p.za_si = len;
    p.v_over_c = s.v * scales.velocity() / si::c;
    return p;
}

}  // namespace qfric
