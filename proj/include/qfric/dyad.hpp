#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qfric {

using cplx = std::complex<double>;

/// Complex 3x3 matrix indexed (x = motion axis, y, z = surface normal).
/// Most kernels are Hermitian; the type does not enforce it, the helpers
/// below check it.
using Dyad = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr int kX = 0;
inline constexpr int kY = 1;
inline constexpr int kZ = 2;

inline Dyad zero_dyad() { return Dyad::Zero(); }

/// (A + A^dagger) / 2
Dyad hermitian_part(Dyad const& a);

/// (A - A^dagger) / (2i); the matrix analogue of an imaginary part.
Dyad anti_hermitian_part(Dyad const& a);

/// Real part of the trace.
double trace_re(Dyad const& a);

/// max |A - A^dagger| <= tol * max(|A|, tiny)
bool is_hermitian(Dyad const& a, double rel_tol = 1e-13);

/// Eigenvalues (ascending) of the Hermitian part of `a`.
Eigen::Vector3d hermitian_eigenvalues(Dyad const& a);

double min_eigenvalue(Dyad const& a);

/// Smallest eigenvalue >= -psd_tol * |trace|.
bool is_psd(Dyad const& a, double psd_tol);

/// Frobenius norm; used as the panel-error norm for dyad quadrature.
double frobenius(Dyad const& a);

/// Hermitian square root of a PSD matrix. Eigenvalues in [-tol*trace, 0) are
/// clamped; anything more negative throws InvariantError.
Dyad psd_sqrt(Dyad const& a, double psd_tol);

/// 2-norm condition number via singular values.
double condition_number(Dyad const& a);

}  // namespace qfric
