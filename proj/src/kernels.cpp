#include "qfric/kernels.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "qfric/errors.hpp"
#include "qfric/material.hpp"
#include "qfric/quadrature.hpp"

namespace qfric {

namespace {

constexpr double kPi = std::numbers::pi;

// Entries of a folded kernel: diag(xx, yy, zz) and the xz coefficient,
// K_xz = -i xz, K_zx = +i xz.
using Folded = ValueArray<cplx, 4>;

Dyad to_dyad(Folded const& f)
{
    Dyad m = Dyad::Zero();
    m(kX, kX) = f[0];
    m(kY, kY) = f[1];
    m(kZ, kZ) = f[2];
    m(kX, kZ) = cplx(0.0, -1.0) * f[3];
    m(kZ, kX) = cplx(0.0, 1.0) * f[3];
    return m;
}

// int_{-qc}^{qc} dq/2pi w(omega + q v) M(q) for a scalar weight w.
template <class W>
std::pair<Dyad, double> fold_integral(W const& w, double omega, double v, Setup const& setup)
{
    Scenario const& s = setup.scenario;
    GeometricDyadTable const& table = *setup.table;
    double const qc = s.q_max();
    auto f = [&](double q) {
        DyadComponents const c = table.components(q);
        cplx const wp = w(omega + q * v);
        cplx const wm = w(omega - q * v);
        cplx const sum = wp + wm;
        Folded r;
        r.v[0] = sum * c.xx;
        r.v[1] = sum * c.yy;
        r.v[2] = sum * c.zz;
        r.v[3] = (wp - wm) * c.xz;
        return r * (1.0 / (2.0 * kPi));
    };
    double const av = std::abs(v);
    double const wsp = s.material.omega_sp();
    double const za = s.z_a;
    std::vector<double> bp = {0.1 / za, 1.0 / za, 5.0 / za};
    if (av > 0.0) {
        for (double x : {omega, wsp - omega, wsp + omega}) {
            bp.push_back(std::abs(x) / av);
        }
    }
    QuadOptions opts;
    opts.rel_tol = s.numerics.rel_tol_quad;
    opts.max_panels = 40000;
    auto res = integrate<Folded>(f, 0.0, qc, bp, opts);
    return {to_dyad(res.value), res.err};
}

template <class W>
KernelSample kernel(double omega, double v, Setup const& setup, W const& w)
{
    if (!setup.table) {
        throw ValidationError("kernel: setup without geometric table");
    }
    KernelSample out;
    out.omega = omega;
    out.v = v;
    if (v == 0.0) {
        // Static in q: the weight factors out of the q integral.
        cplx const f = w(omega);
        out.value = f * setup.table->integrated();
        out.err = 1e-13 * std::abs(f) * frobenius(setup.table->integrated());
        return out;
    }
    auto [value, err] = fold_integral(w, omega, v, setup);
    out.value = value;
    out.err = err;
    return out;
}

}  // namespace

std::shared_ptr<GeometricDyadTable const> shared_geometric_table(double za, double q_max)
{
    static std::mutex mu;
    static std::map<std::pair<double, double>, std::shared_ptr<GeometricDyadTable const>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(za, q_max);
    auto it = cache.find(key);
    if (it != cache.end()) {
        return it->second;
    }
    auto t = GeometricDyadTable::build(za, q_max);
    cache.emplace(key, t);
    return t;
}

Setup Setup::make(Scenario const& s)
{
    s.validate();
    return Setup{s, shared_geometric_table(s.z_a, s.q_max())};
}

KernelSample noise_kernel(double omega, double v, Setup const& setup)
{
    MaterialParams const& m = setup.scenario.material;
    return kernel(omega, v, setup, [&](double x) { return cplx(std::abs(im_r_tm(m, x))); });
}

KernelSample dissipation_kernel(double omega, double v, Setup const& setup)
{
    MaterialParams const& m = setup.scenario.material;
    return kernel(omega, v, setup, [&](double x) { return cplx(im_r_tm(m, x)); });
}

KernelSample one_sided_kernel(double omega, double v, Setup const& setup, int sign)
{
    if (sign != 1 && sign != -1) {
        throw DomainError("one_sided_kernel: sign must be +1 or -1");
    }
    MaterialParams const& m = setup.scenario.material;
    // theta(sign * x) |Im r(x)| = max(sign * Im r(x), 0) since Im r has the sign of x.
    return kernel(omega, v, setup, [&](double x) {
        return cplx(2.0 * std::max(sign * im_r_tm(m, x), 0.0));
    });
}

KernelSample level_shift(double omega, double v, Setup const& setup)
{
    MaterialParams const& m = setup.scenario.material;
    return kernel(omega, v, setup, [&](double x) { return r_tm(m, x); });
}

KernelSet kernel_set(double omega, double v, Setup const& setup)
{
    return {level_shift(omega, v, setup), noise_kernel(omega, v, setup),
            one_sided_kernel(omega, v, setup, +1), one_sided_kernel(omega, v, setup, -1)};
}

}  // namespace qfric
