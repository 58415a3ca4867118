#include "qfric/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qfric/errors.hpp"
#include "qfric/material.hpp"
#include "qfric/spectral_table.hpp"

namespace qfric {

namespace {

constexpr double kPi = std::numbers::pi;

// Outer frequency integrals sit on inner q-quadratures accurate to
// rel_tol_quad; asking the outer level for more than ~100x that only
// chases noise.
double outer_tol(Scenario const& s)
{
    return std::max(100.0 * s.numerics.rel_tol_quad, 1e-12);
}

double sgn(double x)
{
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

// Sum_ij A_ij B_ij, the trace of A^T B.
cplx entrywise(Dyad const& a, Dyad const& b)
{
    return a.cwiseProduct(b).sum();
}

std::vector<double> wavevector_breakpoints(Scenario const& s, double omega, double v)
{
    double const za = s.z_a;
    std::vector<double> bp = {0.0, 0.1 / za, -0.1 / za, 1.0 / za, -1.0 / za, 5.0 / za, -5.0 / za};
    if (v != 0.0) {
        double const wsp = s.material.omega_sp();
        for (double x : {-omega, wsp - omega, -wsp - omega}) {
            bp.push_back(x / v);
        }
    }
    return bp;
}

// int dq/2pi Im r(omega + q v) Tr[M(q) X] for Hermitian X.
IntegrationResult<double> doppler_trace(double omega, double v, Dyad const& x, Setup const& setup)
{
    Scenario const& s = setup.scenario;
    MaterialParams const& m = s.material;
    if (v == 0.0) {
        double const val = im_r_tm(m, omega) * entrywise(setup.table->integrated(), x.transpose()).real();
        return {val, 1e-13 * std::abs(val), 0};
    }
    GeometricDyadTable const& table = *setup.table;
    auto f = [&](double q) {
        DyadComponents const c = table.components(q);
        // Tr[M X] with M_xz = -i c.xz, M_zx = +i c.xz
        double const tr = c.xx * x(kX, kX).real() + c.yy * x(kY, kY).real()
                          + c.zz * x(kZ, kZ).real()
                          + (cplx(0.0, -c.xz) * x(kZ, kX) + cplx(0.0, c.xz) * x(kX, kZ)).real();
        return im_r_tm(m, omega + q * v) * tr / (2.0 * kPi);
    };
    double const qc = s.q_max();
    auto bp = wavevector_breakpoints(s, omega, v);
    QuadOptions opts;
    opts.rel_tol = s.numerics.rel_tol_quad;
    opts.abs_tol = 1e-300;
    opts.max_panels = 40000;
    return integrate<double>(f, -qc, qc, bp, opts);
}


// Offsets |omega| - omega_a spanned by the dressed resonances, padded by
// 1e4 widths. Inside this window integrands are evaluated at exact offsets.
struct ResonanceWindow
{
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> offsets;  // breakpoints in the offset variable
};

std::optional<ResonanceWindow> resonance_window(Setup const& setup, double v)
{
    double const wa = setup.scenario.omega_a;
    auto const res = dressed_resonances(v, setup);
    if (res.empty()) return std::nullopt;
    ResonanceWindow w;
    double smin = res.front().shift, smax = smin, gmax = 0.0;
    for (auto const& r : res) {
        smin = std::min(smin, r.shift);
        smax = std::max(smax, r.shift);
        gmax = std::max(gmax, r.width);
        w.offsets.push_back(r.shift);
        for (int k = -1; k <= 8; ++k) {
            double const d = r.width * std::pow(10.0, k);
            w.offsets.push_back(r.shift - d);
            w.offsets.push_back(r.shift + d);
        }
    }
    double const pad = std::min(1e4 * gmax, 0.1 * (wa + smin));
    w.lo = std::max(smin - pad, -0.5 * wa);
    w.hi = smax + pad;
    if (!(w.hi > w.lo)) return std::nullopt;
    return w;
}

// int_a^b f(omega, |omega| - omega_a) d omega, switching to the offset
// variable inside the resonance windows at +-omega_a.
template <class V, class F>
IntegrationResult<V> integrate_omega(F const& f, double a, double b, std::vector<double> const& bp,
                                     QuadOptions const& opts, Setup const& setup, double v)
{
    double const wa = setup.scenario.omega_a;
    auto const win = resonance_window(setup, v);
    auto plain = [&](double w) { return f(w, std::abs(w) - wa); };
    if (!win) {
        return integrate<V>(plain, a, b, bp, opts);
    }
    // Segments of [a, b]: 0 plain, +1 positive window, -1 negative window.
    struct Segment
    {
        double lo, hi;
        int kind;
    };
    std::vector<std::pair<double, int>> cuts = {{-wa - win->hi, -1}, {-wa - win->lo, 0},
                                                {wa + win->lo, 1}, {wa + win->hi, 0}};
    std::vector<Segment> segs;
    double x = a;
    int kind = 0;
    for (auto const& [c, k] : cuts) {
        if (c <= x) {
            kind = k;
            continue;
        }
        double const end = std::min(c, b);
        if (end > x) segs.push_back({x, end, kind});
        x = end;
        kind = k;
        if (x >= b) break;
    }
    if (x < b) segs.push_back({x, b, kind});

    IntegrationResult<V> total{};
    bool first = true;
    for (auto const& sg : segs) {
        IntegrationResult<V> r;
        if (sg.kind == 0) {
            r = integrate<V>(plain, sg.lo, sg.hi, bp, opts);
        } else {
            double const sgn = sg.kind;
            // omega = sgn (omega_a + o)
            double olo = sgn > 0 ? sg.lo - wa : -sg.hi - wa;
            double ohi = sgn > 0 ? sg.hi - wa : -sg.lo - wa;
            if (sgn > 0 && sg.lo == wa + win->lo) olo = win->lo;
            if (sgn > 0 && sg.hi == wa + win->hi) ohi = win->hi;
            if (sgn < 0 && sg.hi == -wa - win->lo) olo = win->lo;
            if (sgn < 0 && sg.lo == -wa - win->hi) ohi = win->hi;
            std::vector<double> obp = win->offsets;
            for (double p : bp) obp.push_back(sgn * p - wa);
            auto g = [&](double o) { return f(sgn * (wa + o), o); };
            r = integrate<V>(g, olo, ohi, obp, opts);
        }
        if (first) {
            total = r;
            first = false;
        } else {
            total.value = V(total.value + r.value);
            total.err += r.err;
            total.panels += r.panels;
        }
    }
    return total;
}

}  // namespace

std::vector<double> frequency_breakpoints(Setup const& setup, double v)
{
    Scenario const& s = setup.scenario;
    double const av = std::abs(v);
    double const wsp = s.material.omega_sp();
    double const qc = s.q_max();
    std::vector<double> bp = {wsp, s.omega_a};
    if (av > 0.0) {
        for (int k = -6; k <= 1; ++k) {
            bp.push_back(av / s.z_a * std::pow(10.0, k));
        }
        bp.push_back(qc * av);
        bp.push_back(2.0 * qc * av);
        bp.push_back(wsp + qc * av);
        bp.push_back(wsp - qc * av);
    }
    for (auto const& r : dressed_resonances(v, setup)) {
        bp.push_back(r.omega);
        for (int k = -1; k <= 8; ++k) {
            double const d = r.width * std::pow(10.0, k);
            bp.push_back(r.omega - d);
            bp.push_back(r.omega + d);
        }
    }
    std::vector<double> out;
    for (double x : bp) {
        if (x > 0.0 && std::isfinite(x)) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

IntegrationResult<double> frequency_integral(std::function<double(double, double)> const& f,
                                             Setup const& setup, double v)
{
    Scenario const& s = setup.scenario;
    double const c = s.numerics.omega_cutoff;
    double const w_max =
        std::max({c * s.omega_a, c * s.material.omega_sp(), 1e3 * std::abs(v) / s.z_a});
    auto bp = frequency_breakpoints(setup, v);
    QuadOptions opts;
    opts.rel_tol = outer_tol(s);
    opts.abs_tol = 1e-300;
    opts.max_panels = 20000;
    auto res = integrate_omega<double>(f, 0.0, w_max, bp, opts, setup, v);

    // Power-law tail beyond omega_max.
    double const wa = s.omega_a;
    double const f1 = f(w_max, w_max - wa);
    double const f2 = f(2.0 * w_max, 2.0 * w_max - wa);
    double tail = 0.0;
    if (f1 != 0.0) {
        double const p = std::log(std::abs(f2 / f1)) / std::log(2.0);
        if (!(p < -1.0) || f1 * f2 < 0.0) {
            throw ConvergenceError("frequency_integral: integrand does not decay beyond omega_max",
                                   res.value, std::abs(f1) * w_max);
        }
        tail = f1 * w_max / (-p - 1.0);
    }
    if (std::abs(tail) > s.numerics.rel_tol_quad * std::abs(res.value) + 1e-300) {
        throw ConvergenceError("frequency_integral: tail beyond omega_max above tolerance",
                               res.value + tail, std::abs(tail));
    }
    res.value += tail;
    res.err += std::abs(tail);
    return res;
}

PowerReport power_balance(Setup const& setup, NoiseModel model)
{
    double const v = setup.scenario.v;
    PowerReport r;
    r.v = v;

    auto in = [&](double w, double o) {
        if (w == 0.0) return 0.0;
        Dyad const delta = level_shift(w, v, setup).value;
        auto const a = alpha_dressed(w, v, setup.scenario, delta, o);
        Dyad const nu = noise_kernel(w, v, setup).value;
        return w * entrywise(nu.transpose(), a.alpha_im).real() / kPi;
    };
    auto out = [&](double w, double o) {
        if (w == 0.0) return 0.0;
        auto const p = sigma_spectrum(w, v, setup, model, o);
        return w * doppler_trace(w, v, p.sigma, setup).value / kPi;
    };
    auto ri = frequency_integral(in, setup, v);
    auto ro = frequency_integral(out, setup, v);
    r.p_in = ri.value;
    r.err_in = ri.err;
    r.p_out = ro.value;
    r.err_out = ro.err;
    r.p_net = r.p_in - r.p_out;
    r.err_net = r.err_in + r.err_out;
    return r;
}

double lte_power_asymptote(Scenario const& s)
{
    double const rho = s.material.resistivity();
    double const v = s.v;
    double const a = s.alpha0_tilde;
    return 45.0 * std::pow(v, 4) * a * a * rho * rho
           / (std::pow(2.0 * kPi, 3) * std::pow(2.0 * s.z_a, 10));
}

PowerReport lte_power(Setup const& setup)
{
    PowerReport r = power_balance(setup);
    Scenario const& s = setup.scenario;
    double const v = s.v;
    r.p_lte_asymptotic = lte_power_asymptote(s);
    if (v == 0.0) {
        return r;
    }
    // nu - D vanishes identically once omega exceeds q_max |v|.
    double const w_hi = s.q_max() * std::abs(v);
    auto f = [&](double w, double o) {
        if (w == 0.0) return 0.0;
        auto const a = alpha_dressed(w, v, setup, o);
        Dyad const nm = one_sided_kernel(w, v, setup, -1).value;
        return w * entrywise(nm.transpose(), a.alpha_im).real() / kPi;
    };
    auto bp = frequency_breakpoints(setup, v);
    QuadOptions opts;
    opts.rel_tol = outer_tol(s);
    opts.abs_tol = 1e-300;
    auto res = integrate_omega<double>(f, 0.0, w_hi, bp, opts, setup, v);
    r.p_lte = res.value;
    r.err_lte = res.err;
    return r;
}

ResolvedBalance resolved_balance(Setup const& setup, NoiseModel model)
{
    Scenario const& s = setup.scenario;
    double const v = s.v;
    ResolvedBalance r;
    r.v = v;
    if (v == 0.0) {
        return r;
    }
    auto const lte = lte_power(setup);
    r.in_excess = lte.p_lte;
    r.err_in = lte.err_lte;
    if (model == NoiseModel::exact) {
        double const w_hi = s.q_max() * std::abs(v);
        auto f = [&](double w, double o) {
            if (w == 0.0) return 0.0;
            auto const a = alpha_dressed(w, v, setup, o);
            Dyad const nm = one_sided_kernel(w, v, setup, -1).value;
            Dyad const x = a.value * nm * a.value.adjoint();
            return w * doppler_trace(w, v, x, setup).value / kPi;
        };
        auto bp = frequency_breakpoints(setup, v);
        QuadOptions opts;
        opts.rel_tol = outer_tol(s);
        opts.abs_tol = 1e-300;
        auto res = integrate_omega<double>(f, 0.0, w_hi, bp, opts, setup, v);
        r.out_excess = res.value;
        r.err_out = res.err;
    }
    r.imbalance = r.in_excess - r.out_excess;
    return r;
}

FdiSample fdi_ratio(double omega, double v, Setup const& setup)
{
    if (!(omega > 0.0)) {
        throw DomainError("fdi_ratio: omega must be positive");
    }
    double const tn = trace_re(noise_kernel(omega, v, setup).value);
    double const td = trace_re(dissipation_kernel(omega, v, setup).value);
    if (!(std::abs(td) > 1e-15 * std::abs(tn))) {
        throw DomainError("fdi_ratio: Tr D below the division floor");
    }
    FdiSample out;
    out.omega = omega;
    out.v = v;
    out.ratio = tn / std::abs(td);
    out.asymptote = std::max(1.0, 3.0 * std::abs(v) / (kPi * setup.scenario.z_a * omega));
    return out;
}

double spectral_energy(double omega, double v, Setup const& setup, NoiseModel model,
                       std::optional<double> offset)
{
    if (omega < 0.0) {
        throw DomainError("spectral_energy: omega must be nonnegative");
    }
    Scenario const& s = setup.scenario;
    auto const p = sigma_spectrum(omega, v, setup, model, offset);
    double const wa2 = s.omega_a * s.omega_a;
    return (wa2 + omega * omega) / wa2 * trace_re(p.sigma) / (2.0 * kPi * s.alpha0_tilde);
}

EnergyReport total_energy(Setup const& setup, NoiseModel model)
{
    double const v = setup.scenario.v;
    auto res = frequency_integral(
        [&](double w, double o) { return spectral_energy(w, v, setup, model, o); },
                                  setup, v);
    EnergyReport r;
    r.v = v;
    r.total = res.value;
    r.err = res.err;
    r.zero_frequency = spectral_energy(0.0, v, setup, NoiseModel::exact);
    r.zero_frequency_lte = spectral_energy(0.0, v, setup, NoiseModel::lte);
    return r;
}

double bm_spectral_energy(double omega, double gamma_a, double d2, Scenario const& s)
{
    if (!(gamma_a > 0.0)) {
        throw DomainError("bm_spectral_energy: gamma_a must be positive");
    }
    double const wa2 = s.omega_a * s.omega_a;
    double const dw = omega - s.omega_a;
    return d2 / (2.0 * kPi * s.alpha0_tilde) * (wa2 + omega * omega) / wa2 * gamma_a
           / (dw * dw + gamma_a * gamma_a);
}

BornMarkovParams born_markov_params(Setup const& setup, double v)
{
    auto const res = dressed_resonances(v, setup);
    double g = 0.0;
    for (auto const& r : res) g += r.width;
    g /= static_cast<double>(res.size());
    return {g, 1.5 * setup.scenario.alpha0_tilde * setup.scenario.omega_a};
}

FrictionReport friction(Setup const& setup)
{
    Scenario const& s = setup.scenario;
    double const v = s.v;
    FrictionReport rep;
    rep.v = v;
    if (v == 0.0) {
        return rep;
    }
    MaterialParams const& m = s.material;
    double const qc = s.q_max();
    double const x_max = qc * std::abs(v);
    GeometricDyadTable const& table = *setup.table;

    // W_q(x) and W_w(x): int_{q v > x} dq/2pi {q, q v - x} Im r(q v - x) M(q).
    using Pair = ValueArray<Dyad, 2>;
    auto weights = [&](double x) {
        double lo = -qc, hi = qc;
        if (v > 0.0) {
            lo = std::max(lo, x / v);
        } else {
            hi = std::min(hi, x / v);
        }
        Pair zero;
        zero[0] = Dyad::Zero();
        zero[1] = Dyad::Zero();
        if (!(hi > lo)) {
            return zero;
        }
        auto f = [&](double q) {
            double const w = q * v - x;
            Dyad const g = (im_r_tm(m, w) / (2.0 * kPi)) * table(q);
            Pair p;
            p[0] = q * g;
            p[1] = w * g;
            return p;
        };
        std::vector<double> bp = wavevector_breakpoints(s, -x, v);
        QuadOptions opts;
        opts.rel_tol = s.numerics.rel_tol_quad;
        opts.abs_tol = 1e-300;
        opts.max_panels = 40000;
        return integrate<Pair>(f, lo, hi, bp, opts).value;
    };

    std::vector<double> xbp = {0.0};
    for (int k = -6; k <= 1; ++k) {
        double const d = std::abs(v) / s.z_a * std::pow(10.0, k);
        xbp.push_back(d);
        xbp.push_back(-d);
    }
    double const wsp = m.omega_sp();
    xbp.push_back(wsp);
    xbp.push_back(-wsp);

    auto const res = dressed_resonances(v, setup);
    bool direct = false;
    for (auto const& r : res) {
        if (r.omega < 1.05 * x_max) {
            direct = true;
            xbp.push_back(r.omega);
            xbp.push_back(-r.omega);
            for (int k = -1; k <= 8; ++k) {
                double const d = r.width * std::pow(10.0, k);
                for (double c : {r.omega, -r.omega}) {
                    xbp.push_back(c - d);
                    xbp.push_back(c + d);
                }
            }
        }
    }

    QuadOptions opts;
    opts.rel_tol = outer_tol(s);
    opts.abs_tol = 1e-300;
    opts.max_panels = 20000;

    if (direct) {
        using Two = ValueArray<double, 2>;
        auto f = [&](double x, double o) {
            Dyad const sx = sigma_spectrum(x, v, setup, NoiseModel::exact, o).s;
            Pair const w = weights(x);
            Two t;
            t[0] = -2.0 * entrywise(sx, w[0]).real();
            t[1] = 2.0 * entrywise(sx, w[1]).real();
            return t;
        };
        auto r = integrate_omega<Two>(f, -x_max, x_max, xbp, opts, setup, v);
        rep.f_fric = r.value[0];
        rep.p_rad = r.value[1];
        rep.err_f = r.err;
        rep.err_rad = r.err;
        rep.tabulated = false;
    } else {
        int const n = std::max(s.numerics.grid_size, 9) | 1;  // odd: the coarse grid keeps both ends
        SpectralTable const fine = SpectralTable::sample(
            [&](double x) { return sigma_spectrum(x, v, setup).s; }, -x_max, x_max, n);
        SpectralTable const coarse = fine.half_resolution();
        using Four = ValueArray<double, 4>;
        auto f = [&](double x) {
            Pair const w = weights(x);
            Dyad const sf = fine(x);
            Dyad const sc = coarse(x);
            Four t;
            t[0] = -2.0 * entrywise(sf, w[0]).real();
            t[1] = 2.0 * entrywise(sf, w[1]).real();
            t[2] = -2.0 * entrywise(sc, w[0]).real();
            t[3] = 2.0 * entrywise(sc, w[1]).real();
            return t;
        };
        auto r = integrate<Four>(f, -x_max, x_max, xbp, opts);
        rep.f_fric = r.value[0];
        rep.p_rad = r.value[1];
        // Cubic interpolation: halving the spacing cuts the error by 16.
        double const df = std::abs(r.value[0] - r.value[2]) / 15.0;
        double const dp = std::abs(r.value[1] - r.value[3]) / 15.0;
        rep.err_f = r.err + df;
        rep.err_rad = r.err + dp;
        rep.interpolation_err = std::max(df / std::abs(rep.f_fric), dp / std::abs(rep.p_rad));
    }
    rep.p_ext = -v * rep.f_fric;
    rep.residual = std::abs(rep.p_rad - rep.p_ext) / std::abs(rep.p_rad);
    return rep;
}

}  // namespace qfric
