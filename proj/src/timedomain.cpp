#include "qfric/timedomain.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "qfric/errors.hpp"
#include "qfric/polarizability.hpp"

namespace qfric {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW planning is not thread safe; execution with the new-array interface is.
std::mutex& plan_mutex()
{
    static std::mutex m;
    return m;
}

class R2RPlan
{
  public:
    explicit R2RPlan(int n)
    {
        std::vector<double> buf(n);
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan_ = fftw_plan_r2r_1d(n, buf.data(), buf.data(), FFTW_REDFT00, FFTW_ESTIMATE);
    }
    ~R2RPlan()
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan_);
    }
    R2RPlan(R2RPlan const&) = delete;
    R2RPlan& operator=(R2RPlan const&) = delete;
    void run(std::vector<double>& x) const { fftw_execute_r2r(plan_, x.data(), x.data()); }

  private:
    fftw_plan plan_;
};

// Real <-> half-complex transforms of length n.
class RealPlans
{
  public:
    explicit RealPlans(int n) : n_(n)
    {
        std::vector<double> r(n);
        std::vector<fftw_complex> c(n / 2 + 1);
        std::lock_guard<std::mutex> lock(plan_mutex());
        forward_ = fftw_plan_dft_r2c_1d(n, r.data(), c.data(), FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(n, c.data(), r.data(), FFTW_ESTIMATE);
    }
    ~RealPlans()
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    RealPlans(RealPlans const&) = delete;
    RealPlans& operator=(RealPlans const&) = delete;

    // sum_n x_n e^{-2 pi i k n / N}, k = 0..N/2
    void forward(std::vector<double>& x, std::vector<cplx>& out) const
    {
        out.resize(n_ / 2 + 1);
        fftw_execute_dft_r2c(forward_, x.data(), reinterpret_cast<fftw_complex*>(out.data()));
    }
    // sum_k X_k e^{+2 pi i k n / N} over the Hermitian extension; destroys `in`.
    void backward(std::vector<cplx>& in, std::vector<double>& out) const
    {
        out.resize(n_);
        fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    }

  private:
    int n_;
    fftw_plan forward_;
    fftw_plan backward_;
};

bool power_of_two(int n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

int next_power_of_two(int n)
{
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Entrywise imaginary part of Delta divided by omega; finite at omega = 0.
Real3 memory_spectrum(Setup const& setup, double v, double omega)
{
    Dyad const d = level_shift(omega, v, setup).value;
    return d.imag() / omega;
}

}  // namespace

void TimeDomainConfig::validate(Scenario const& s) const
{
    double const wmax = std::max(s.omega_a, s.material.omega_sp());
    if (!(dt > 0.0) || !(dt < 0.05 / wmax)) {
        throw ValidationError("time domain: dt must lie in (0, 0.05 / max(omega_a, omega_sp))");
    }
    if (burn_in < 0 || !power_of_two(record) || record < 64) {
        throw ValidationError("time domain: record must be a power of two >= 64, burn_in >= 0");
    }
    if (realizations < 2) {
        throw ValidationError("time domain: need at least two realizations");
    }
    if (!(truncation > 0.0 && truncation < 1.0)) {
        throw ValidationError("time domain: truncation must lie in (0, 1)");
    }
    if (workers < 1) {
        throw ValidationError("time domain: workers must be >= 1");
    }
}

MemoryKernel memory_kernel(Setup const& setup, double v, double dt, double truncation)
{
    // DCT-I on omega_k = k pi / (M dt) gives gamma at tau_j = j dt.
    int const m = 1 << 16;
    double const dw = kPi / (m * dt);
    std::vector<Real3> f(m + 1);
    f[0] = memory_spectrum(setup, v, 1e-4 * dw);
    for (int k = 1; k <= m; ++k) {
        f[k] = memory_spectrum(setup, v, k * dw);
    }
    MemoryKernel out;
    out.dt = dt;
    std::vector<Real3> g(m + 1, Real3::Zero());
    R2RPlan const plan(m + 1);
    std::vector<double> buf(m + 1);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            for (int k = 0; k <= m; ++k) buf[k] = f[k](a, b);
            plan.run(buf);
            // REDFT00: y_j = x_0 + (-1)^j x_M + 2 sum_k x_k cos(pi j k / M); trapezoid weights.
            for (int j = 0; j <= m; ++j) g[j](a, b) = buf[j] * dw / (2.0 * kPi);
        }
    }
    double const g0 = g[0].norm();
    if (!(g0 > 0.0)) {
        throw InvariantError("memory_kernel: gamma(0) vanishes");
    }
    int last = 0;
    for (int j = 0; j <= m; ++j) {
        if (g[j].norm() >= truncation * g0) last = j;
    }
    if (last > m / 2) {
        throw ConvergenceError("memory_kernel: memory longer than the transform window",
                               g[last].norm(), g0);
    }
    out.gamma.assign(g.begin(), g.begin() + last + 1);
    Dyad const d0 = level_shift(0.0, v, setup).value;
    out.static_shift = d0.real();
    return out;
}

NoiseSynthesizer::NoiseSynthesizer(Setup const& setup, double v, double dt, int n)
    : dt_(dt), n_(n)
{
    if (!power_of_two(n) || n < 4) {
        throw ValidationError("NoiseSynthesizer: length must be a power of two");
    }
    double const scale = std::sqrt(1.0 / (n * dt));
    double const tol = setup.scenario.numerics.psd_tol;
    root_.assign(n / 2 + 1, Dyad::Zero());
    // The DC and Nyquist bins are left empty.
    for (int k = 1; k < n / 2; ++k) {
        double const w = 2.0 * kPi * k / (n * dt);
        root_[k] = scale * psd_sqrt(noise_kernel(w, v, setup).value, tol);
    }
}

NoiseSynthesizer NoiseSynthesizer::silent(double dt, int n)
{
    if (!power_of_two(n) || n < 4) {
        throw ValidationError("NoiseSynthesizer: length must be a power of two");
    }
    NoiseSynthesizer s;
    s.dt_ = dt;
    s.n_ = n;
    s.root_.assign(n / 2 + 1, Dyad::Zero());
    return s;
}

std::vector<Vec3> NoiseSynthesizer::draw(std::uint64_t seed) const
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    int const h = n_ / 2 + 1;
    std::vector<std::vector<cplx>> spec(3, std::vector<cplx>(h, cplx(0.0)));
    for (int k = 1; k < n_ / 2; ++k) {
        Eigen::Vector3cd z;
        for (int a = 0; a < 3; ++a) z(a) = cplx(normal(rng), normal(rng));
        Eigen::Vector3cd const y = root_[k] * z;
        // x_n = sum_k 2 Re(Y_k e^{-i w_k t_n}); c2r uses e^{+i}, hence the conjugate.
        for (int a = 0; a < 3; ++a) spec[a][k] = std::conj(y(a));
    }
    RealPlans const plans(n_);
    std::vector<Vec3> out(n_, Vec3::Zero());
    std::vector<double> x;
    for (int a = 0; a < 3; ++a) {
        plans.backward(spec[a], x);
        for (int i = 0; i < n_; ++i) out[i](a) = x[i];
    }
    return out;
}

Trajectory evolve_dipole(std::vector<Vec3> const& noise, MemoryKernel const& kernel,
                         Scenario const& s, int burn_in, int record, double energy_bound)
{
    long const steps = static_cast<long>(burn_in) + record;
    if (static_cast<long>(noise.size()) < steps) {
        throw ValidationError("evolve_dipole: noise shorter than burn-in plus record");
    }
    double const dt = kernel.dt;
    double const wa = s.omega_a;
    double const mass = 1.0 / (s.alpha0_tilde * wa * wa);
    Real3 const stiffness = mass * wa * wa * Real3::Identity() - kernel.static_shift;
    int const len = static_cast<int>(kernel.gamma.size());

    // Trapezoid over tau_j = j dt: weight 1/2 at both ends.
    std::array<std::vector<double>, 9> g;
    for (int e = 0; e < 9; ++e) g[e].assign(std::max(len - 1, 0), 0.0);
    for (int j = 1; j < len; ++j) {
        double const c = (j == len - 1) ? 0.5 : 1.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) g[3 * a + b][j - 1] = 2.0 * dt * c * kernel.gamma[j](a, b);
    }
    Real3 const g0 = len > 0 ? Real3(dt * kernel.gamma[0]) : Real3(Real3::Zero());
    Real3 const lhs_inv = (2.0 * mass / dt * Real3::Identity() + g0).inverse();

    // Velocity history, newest first: hist[b][head + j - 1] = v_{n+1-j}.
    int const window = std::max(len - 1, 1);
    int const chunk = 4096;
    int const cap = window + chunk;
    std::array<std::vector<double>, 3> hist;
    for (auto& h : hist) h.assign(cap, 0.0);
    int head = chunk;

    auto memory = [&]() {
        Vec3 m = Vec3::Zero();
        if (len < 2) return m;
        for (int a = 0; a < 3; ++a) {
            double acc = 0.0;
            for (int b = 0; b < 3; ++b) {
                double const* gp = g[3 * a + b].data();
                double const* vp = hist[b].data() + head;
                double sum = 0.0;
                for (int j = 0; j < len - 1; ++j) sum += gp[j] * vp[j];
                acc += sum;
            }
            m(a) = acc;
        }
        return m;
    };

    Vec3 d = Vec3::Zero();
    Vec3 vel = Vec3::Zero();
    Vec3 acc = Vec3::Zero();
    Trajectory out;
    out.d.reserve(record);
    double p_in = 0.0;
    double p_out = 0.0;
    for (long n = 0; n < steps; ++n) {
        Vec3 const v_half = vel + 0.5 * dt * acc;
        d += dt * v_half;
        Vec3 const hist_force = memory();
        Vec3 const rhs = 2.0 * mass / dt * v_half + noise[n] - stiffness * d - hist_force;
        Vec3 const v_new = lhs_inv * rhs;
        acc = 2.0 * (v_new - v_half) / dt;
        vel = v_new;

        if (head == 0) {
            for (auto& h : hist) std::copy(h.begin(), h.begin() + window, h.begin() + chunk);
            head = chunk;
        }
        --head;
        for (int b = 0; b < 3; ++b) hist[b][head] = vel(b);

        if (n >= burn_in) {
            out.d.push_back(d);
            Vec3 const mem = hist_force + g0 * vel;
            p_in += noise[n].dot(vel);
            p_out += vel.dot(mem - kernel.static_shift * d);
        }
        if ((n & 1023) == 0 || n == steps - 1) {
            double const e = 0.5 * mass * (vel.squaredNorm() + wa * wa * d.squaredNorm());
            if (!std::isfinite(e) || e > energy_bound) {
                throw InvariantError("evolve_dipole: energy grew beyond bound at step "
                                     + std::to_string(n));
            }
        }
    }
    out.p_in = p_in / record;
    out.p_out = p_out / record;
    return out;
}

std::vector<double> free_oscillator_energy(Scenario const& s, Vec3 const& d0, double dt,
                                           long steps, long stride)
{
    double const wa = s.omega_a;
    double const mass = 1.0 / (s.alpha0_tilde * wa * wa);
    Vec3 d = d0;
    Vec3 vel = Vec3::Zero();
    Vec3 acc = -wa * wa * d;
    std::vector<double> energies;
    for (long n = 0; n <= steps; ++n) {
        if (n % stride == 0) {
            energies.push_back(0.5 * mass * (vel.squaredNorm() + wa * wa * d.squaredNorm()));
        }
        vel += 0.5 * dt * acc;
        d += dt * vel;
        acc = -wa * wa * d;
        vel += 0.5 * dt * acc;
    }
    return energies;
}

std::vector<Dyad> periodogram(std::vector<Vec3> const& x, double dt)
{
    int const n = static_cast<int>(x.size());
    if (!power_of_two(n)) {
        throw ValidationError("periodogram: length must be a power of two");
    }
    std::vector<double> w(n);
    double w2 = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
        w2 += w[i] * w[i];
    }
    RealPlans const plans(n);
    std::array<std::vector<cplx>, 3> f;
    std::vector<double> buf(n);
    for (int a = 0; a < 3; ++a) {
        for (int i = 0; i < n; ++i) buf[i] = w[i] * x[i](a);
        plans.forward(buf, f[a]);
    }
    std::vector<Dyad> out(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) {
        // d(omega) = sum d(t) e^{+i omega t}: conjugate of the forward transform.
        Eigen::Vector3cd u(std::conj(f[0][k]), std::conj(f[1][k]), std::conj(f[2][k]));
        out[k] = (dt / w2) * (u * u.adjoint());
    }
    return out;
}

EnsembleResult run_ensemble(Setup const& setup, double v, TimeDomainConfig const& cfg,
                            std::vector<double> const& edges)
{
    Scenario const& s = setup.scenario;
    cfg.validate(s);
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) || !(edges.front() > 0.0)) {
        throw ValidationError("run_ensemble: bin edges must be positive and increasing");
    }
    MemoryKernel const kernel = memory_kernel(setup, v, cfg.dt, cfg.truncation);
    int const n_noise = next_power_of_two(cfg.burn_in + cfg.record);
    NoiseSynthesizer const synth(setup, v, cfg.dt, n_noise);

    int const nb = static_cast<int>(edges.size()) - 1;
    double const dw = 2.0 * kPi / (cfg.record * cfg.dt);
    std::vector<std::pair<int, int>> range(nb);
    for (int b = 0; b < nb; ++b) {
        int const k0 = static_cast<int>(std::ceil(edges[b] / dw));
        int const k1 = static_cast<int>(std::ceil(edges[b + 1] / dw));
        range[b] = {k0, std::min(k1, cfg.record / 2 + 1)};
        if (range[b].second <= range[b].first) {
            throw ValidationError("run_ensemble: bin narrower than the frequency resolution");
        }
    }

    struct Sample
    {
        std::vector<Dyad> band;
        double p_in;
        double p_out;
    };
    std::vector<Sample> samples(cfg.realizations);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            int const r = next++;
            if (r >= cfg.realizations) return;
            try {
                auto const noise = synth.draw(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(r));
                auto const traj = evolve_dipole(noise, kernel, s, cfg.burn_in, cfg.record);
                auto const p = periodogram(traj.d, cfg.dt);
                Sample smp;
                smp.band.assign(nb, Dyad::Zero());
                for (int b = 0; b < nb; ++b) {
                    for (int k = range[b].first; k < range[b].second; ++k) smp.band[b] += p[k];
                    smp.band[b] /= static_cast<double>(range[b].second - range[b].first);
                }
                smp.p_in = traj.p_in;
                smp.p_out = traj.p_out;
                samples[r] = std::move(smp);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cfg.realizations;
                return;
            }
        }
    };
    int const nw = std::min(cfg.workers, cfg.realizations);
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Reduction in realization order keeps results independent of the worker count.
    EnsembleResult res;
    res.v = v;
    res.realizations = cfg.realizations;
    res.memory_steps = static_cast<int>(kernel.gamma.size());
    double const nr = cfg.realizations;
    auto stats = [&](auto value) {
        double m = 0.0, q = 0.0;
        for (auto const& smp : samples) m += value(smp);
        m /= nr;
        for (auto const& smp : samples) q += std::pow(value(smp) - m, 2);
        return std::pair<double, double>(m, std::sqrt(q / (nr - 1.0) / nr));
    };
    std::tie(res.p_in, res.p_in_err) = stats([](Sample const& x) { return x.p_in; });
    std::tie(res.p_out, res.p_out_err) = stats([](Sample const& x) { return x.p_out; });
    for (int b = 0; b < nb; ++b) {
        SpectrumBin bin;
        bin.lo = edges[b];
        bin.hi = edges[b + 1];
        bin.raw = range[b].second - range[b].first;
        for (auto const& smp : samples) bin.mean += smp.band[b];
        bin.mean /= nr;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                bin.err(i, j) = stats([&](Sample const& x) { return x.band[b](i, j).real(); }).second;
            }
        }
        std::tie(bin.trace, bin.trace_err) =
            stats([&](Sample const& x) { return trace_re(x.band[b]); });
        for (int k = range[b].first; k < range[b].second; ++k) {
            bin.predicted += sigma_spectrum(k * dw, v, setup).sigma;
        }
        bin.predicted /= static_cast<double>(bin.raw);
        res.bins.push_back(bin);
    }
    return res;
}

}  // namespace qfric
