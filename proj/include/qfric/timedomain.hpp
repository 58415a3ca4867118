#pragma once

// Brute-force time-domain cross-check of the stationary dipole spectrum.
//
// Colored Gaussian noise with spectrum nu(omega, v) drives
//   m (d'' + omega_a^2 d) - Delta(0, v) d + 2 int_0^inf gamma(tau) d'(t - tau) dtau = xi(t),
// m = 1 / (alpha0_tilde omega_a^2). The static term carries the part of
// Delta that the memory integral cannot represent (it vanishes at omega = 0),
// so the frequency-domain solution is exactly alpha(omega, v) xi(omega).
// The symmetric-ordered correlator is treated as a classical spectrum:
// only second moments are compared.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qfric/kernels.hpp"

namespace qfric {

using Vec3 = Eigen::Vector3d;
using Real3 = Eigen::Matrix3d;

struct TimeDomainConfig
{
    double dt = 0.04;
    int burn_in = 8192;      // steps discarded before recording
    int record = 32768;      // recorded steps, a power of two
    int realizations = 200;
    double truncation = 1e-6;  // memory kept while |gamma(tau)| >= truncation |gamma(0)|
    std::uint64_t seed = 20201;
    int workers = 1;

    void validate(Scenario const& s) const;
};

/// gamma(tau_j), tau_j = j dt, j = 0..size-1, from
/// gamma(tau) = (1/pi) int_0^inf cos(omega tau) Im Delta(omega, v) / omega d omega
/// (entrywise imaginary part), and the static matrix Delta(0, v).
struct MemoryKernel
{
    double dt = 0.0;
    std::vector<Real3> gamma;
    Real3 static_shift = Real3::Zero();
};

MemoryKernel memory_kernel(Setup const& setup, double v, double dt, double truncation = 1e-6);

/// Per-bin Hermitian square roots of nu on the grid omega_k = 2 pi k / (n dt).
class NoiseSynthesizer
{
  public:
    NoiseSynthesizer(Setup const& setup, double v, double dt, int n);
    /// Zero spectrum: every draw is identically zero.
    static NoiseSynthesizer silent(double dt, int n);

    /// One periodic realization of length n with <xi(t) xi(t')> = int d omega/2pi nu e^{-i omega (t-t')}.
    std::vector<Vec3> draw(std::uint64_t seed) const;

    int size() const { return n_; }
    double dt() const { return dt_; }

  private:
    NoiseSynthesizer() = default;
    double dt_ = 0.0;
    int n_ = 0;
    std::vector<Dyad> root_;  // k = 0..n/2
};

struct Trajectory
{
    std::vector<Vec3> d;  // recorded dipole samples
    double p_in = 0.0;    // <xi . d'> over the record
    double p_out = 0.0;   // <d' . (memory force - Delta(0) d)>
};

/// Velocity Verlet with the instantaneous memory weight treated implicitly and a
/// trapezoidal convolution over the stored velocity history. Starts from rest;
/// the first `burn_in` steps are discarded. Throws InvariantError if the
/// oscillator energy exceeds `energy_bound`.
Trajectory evolve_dipole(std::vector<Vec3> const& noise, MemoryKernel const& kernel,
                         Scenario const& s, int burn_in, int record,
                         double energy_bound = 1e12);

/// Free oscillator (no memory, no noise) from d(0) = d0, d'(0) = 0: energies
/// m (d'^2 + omega_a^2 d^2) / 2 sampled every `stride` steps.
std::vector<double> free_oscillator_energy(Scenario const& s, Vec3 const& d0, double dt,
                                           long steps, long stride);

/// Band of the coarse comparison grid with ensemble statistics of the Hann
/// periodogram averaged over the raw frequencies inside [lo, hi).
struct SpectrumBin
{
    double lo = 0.0;
    double hi = 0.0;
    int raw = 0;                        // raw periodogram frequencies in the band
    Dyad mean = Dyad::Zero();
    Real3 err = Real3::Zero();          // standard error of the real parts
    double trace = 0.0;
    double trace_err = 0.0;
    Dyad predicted = Dyad::Zero();      // band average of Sigma(omega, v)
};

struct EnsembleResult
{
    double v = 0.0;
    int realizations = 0;
    std::vector<SpectrumBin> bins;
    double p_in = 0.0;
    double p_in_err = 0.0;
    double p_out = 0.0;
    double p_out_err = 0.0;
    int memory_steps = 0;
};

/// Runs the ensemble and fills measured and predicted band averages for
/// `edges` (increasing, positive).
EnsembleResult run_ensemble(Setup const& setup, double v, TimeDomainConfig const& cfg,
                            std::vector<double> const& edges);

/// Hann-windowed periodogram of a real 3-vector series, omega_k = 2 pi k / (n dt), k = 0..n/2.
std::vector<Dyad> periodogram(std::vector<Vec3> const& x, double dt);

}  // namespace qfric
