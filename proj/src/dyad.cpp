#include "qfric/dyad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qfric/errors.hpp"

namespace qfric {

Dyad hermitian_part(Dyad const& a)
{
    return 0.5 * (a + a.adjoint());
}

Dyad anti_hermitian_part(Dyad const& a)
{
    return (a - a.adjoint()) / cplx(0.0, 2.0);
}

double trace_re(Dyad const& a)
{
    return a.trace().real();
}

bool is_hermitian(Dyad const& a, double rel_tol)
{
    double const scale = std::max(a.cwiseAbs().maxCoeff(),
                                  std::numeric_limits<double>::min());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Eigen::Vector3d hermitian_eigenvalues(Dyad const& a)
{
    Eigen::SelfAdjointEigenSolver<Dyad> solver(hermitian_part(a),
                                               Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double min_eigenvalue(Dyad const& a)
{
    return hermitian_eigenvalues(a)(0);
}

bool is_psd(Dyad const& a, double psd_tol)
{
    return min_eigenvalue(a) >= -psd_tol * std::abs(trace_re(a));
}

double frobenius(Dyad const& a)
{
    return a.norm();
}

Dyad psd_sqrt(Dyad const& a, double psd_tol)
{
    Eigen::SelfAdjointEigenSolver<Dyad> solver(hermitian_part(a));
    Eigen::Vector3d lam = solver.eigenvalues();
    double const floor = -psd_tol * std::abs(lam.sum());
    for (int i = 0; i < 3; ++i) {
        if (lam(i) < floor) {
            throw InvariantError("psd_sqrt: matrix has negative eigenvalue "
                                 + std::to_string(lam(i)));
        }
        lam(i) = std::sqrt(std::max(lam(i), 0.0));
    }
    Dyad const& u = solver.eigenvectors();
    return u * lam.cast<cplx>().asDiagonal() * u.adjoint();
}

double condition_number(Dyad const& a)
{
    Eigen::JacobiSVD<Dyad> svd(a);
    auto const& s = svd.singularValues();
    if (s(2) == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / s(2);
}

}  // namespace qfric
