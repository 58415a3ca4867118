#pragma once

// Near-field scattered Green tensor above a planar interface.
//
// The reflection coefficient of a local medium does not depend on the
// parallel wavevector in the near field, so the tensor factorizes as
//   G(q, z_a, omega) = r_tm(omega) * M(q, z_a),
//   M(q, z_a) = int dp_y/(2 pi) (p / 2) exp(-2 p z_a) Pi_+ Pi_+^dagger,
// with p = sqrt(q^2 + p_y^2) and Pi_+ = z - i p_vec / p. M is Hermitian and
// positive semidefinite, has zero xy and yz entries, real diagonal and a
// purely imaginary xz entry, and M(-q) = M(q)^T.

#include <memory>
#include <ostream>
#include <vector>

#include "qfric/dyad.hpp"
#include "qfric/units.hpp"

namespace qfric {

/// Independent entries of M: diag(xx, yy, zz) and M_xz = -i * xz.
struct DyadComponents
{
    double xx = 0.0;
    double yy = 0.0;
    double zz = 0.0;
    double xz = 0.0;

    Dyad to_dyad() const;
};

struct GeometricDyad
{
    double q;
    double za;
    Dyad value;
};

/// Reference path: adaptive p_y quadrature. Throws ConvergenceError.
DyadComponents geometric_components(double q, double za, double rel_tol = 1e-13);
GeometricDyad geometric_dyad(double q, double za, double rel_tol = 1e-13);

/// Closed form through modified Bessel functions K0, K1.
DyadComponents geometric_components_closed_form(double q, double za);

/// Cached M(q) on a log-spaced |q| grid with cubic interpolation of
/// exp(2|q|z_a) M. Built once, read-only afterwards.
class GeometricDyadTable
{
  public:
    static std::shared_ptr<GeometricDyadTable const> build(double za, double q_max,
                                                           int points = 8192);

    DyadComponents components(double q) const;
    Dyad operator()(double q) const { return components(q).to_dyad(); }

    /// int_{-q_max}^{q_max} dq/(2 pi) M(q); diagonal by symmetry.
    Dyad const& integrated() const { return integrated_; }

    double za() const { return za_; }
    double q_max() const { return q_max_; }

    /// Columns: q, xx, yy, zz, xz (M_xz = -i xz).
    void dump_csv(std::ostream& os) const;

  private:
    GeometricDyadTable() = default;

    double za_ = 1.0;
    double q_max_ = 0.0;
    double u_lo_ = 0.0;
    double du_ = 0.0;
    std::vector<DyadComponents> scaled_;  // exp(2|q| za) * components at q = exp(u)
    Dyad integrated_ = Dyad::Zero();
};

/// G_Im(q, omega) = Im r_tm(omega) M(q); odd in omega, PSD for omega > 0.
Dyad g_im(double q, double za, double omega, MaterialParams const& m);
Dyad g_im(GeometricDyadTable const& table, double q, double omega, MaterialParams const& m);

/// G(q, omega) = r_tm(omega) M(q).
Dyad g_full(double q, double za, double omega, MaterialParams const& m);
Dyad g_full(GeometricDyadTable const& table, double q, double omega, MaterialParams const& m);

}  // namespace qfric
