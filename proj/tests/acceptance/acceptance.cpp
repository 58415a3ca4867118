// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qfric/config.hpp"
#include "qfric/geometric_dyad.hpp"
#include "qfric/kernels.hpp"
#include "qfric/observables.hpp"
#include "qfric/polarizability.hpp"
#include "qfric/timedomain.hpp"
#include "scenarios.hpp"

using namespace qfric;
using testing_support::gold;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, std::string const& what)
    {
        if (!ok) {
            pass = false;
            detail << "[violated: " << what << "] ";
        }
    }
};

std::string num(double x)
{
    std::ostringstream os;
    os << std::setprecision(4) << x;
    return os.str();
}

double slope(double x1, double y1, double x2, double y2)
{
    return std::log(y2 / y1) / std::log(x2 / x1);
}

// 1. Power balance on the velocity x polarizability grid.
void power_balance_grid(Outcome& o)
{
    double worst = 0.0;
    for (double vc : {0.0, 1e-5, 1e-4}) {
        for (double a0 : {1e-6, 1e-4}) {
            auto const r = power_balance(Setup::make(gold(vc, a0)));
            double const rel = std::abs(r.p_in - r.p_out) / r.p_in;
            worst = std::max(worst, rel);
            o.require(r.p_in > 0.0, "P_in > 0 at v/c=" + num(vc));
        }
    }
    o.require(worst <= 1e-4, "|P_in-P_out|/P_in <= 1e-4");
    o.detail << "max |P_in-P_out|/P_in over 6 points = " << num(worst);
}

// 2. LTE imbalance sign, asymptote and log-log slopes.
void lte_scaling(Outcome& o)
{
    Scenario const base = gold();
    std::vector<double> ratios;
    std::vector<double> powers;
    std::vector<double> const vs = {1e-5, 3e-5, 1e-4};
    for (double v : vs) {
        auto const r = lte_power(Setup::make(base.with_velocity(v)));
        o.require(r.p_lte > 0.0, "P_LTE > 0");
        powers.push_back(r.p_lte);
        ratios.push_back(r.p_lte / r.p_lte_asymptotic);
    }
    for (double r : ratios) o.require(std::abs(r - 1.0) <= 0.1, "ratio within 10%");
    o.require(std::abs(ratios[0] - 1.0) <= std::abs(ratios[2] - 1.0) + 1e-6,
              "ratio approaches 1 as v decreases");
    double const sv = slope(vs[0], powers[0], vs[2], powers[2]);
    o.require(std::abs(sv - 4.0) <= 0.1, "v slope 4 +- 0.1");

    double const a1 = base.alpha0_tilde / 10.0;
    double const a2 = base.alpha0_tilde;
    double const pa1 = lte_power(Setup::make(base.with_alpha0_tilde(a1))).p_lte;
    double const pa2 = lte_power(Setup::make(base)).p_lte;
    double const sa = slope(a1, pa1, a2, pa2);
    o.require(std::abs(sa - 2.0) <= 0.05, "alpha0 slope 2 +- 0.05");

    // z_a in SI at fixed v/c and fixed SI polarizability.
    auto p_si = [](double za) {
        RunConfig cfg = default_config();
        cfg.si.za_si = za;
        InternalModel const m = to_internal(cfg.si, cfg.numerics);
        return lte_power(Setup::make(m.scenario)).p_lte * m.scales.power();
    };
    double const z1 = 1e-9, z2 = 2e-9;
    double const sz = slope(2 * z1, p_si(z1), 2 * z2, p_si(z2));
    o.require(std::abs(sz + 10.0) <= 0.2, "2 z_a slope -10 +- 0.2");

    o.detail << "P_LTE/asymptote - 1 at v/(z_a w_sp) = 1e-5, 3e-5, 1e-4: " << num(ratios[0] - 1.0) << ", "
             << num(ratios[1] - 1.0) << ", " << num(ratios[2] - 1.0) << "; slopes v " << num(sv) << ", alpha0 "
             << num(sa) << ", 2z_a " << num(sz);
}

// 3. FDI ratio asymptotes at v = 1e-4 c.
void fdi_asymptotes(Outcome& o)
{
    Setup const setup = Setup::make(gold(1e-4));
    double const v = setup.scenario.v;
    double const w0 = v / setup.scenario.z_a;
    double hi_dev = 0.0, lo_dev = 0.0;
    for (double x : {100.0, 300.0, 1e3, 3e3, 1e4}) {
        hi_dev = std::max(hi_dev, std::abs(fdi_ratio(x * w0, v, setup).ratio - 1.0));
    }
    for (double x : {1e-3, 1e-4, 1e-5, 1e-6}) {
        double const expect = 3.0 / kPi / x;
        lo_dev = std::max(lo_dev, std::abs(fdi_ratio(x * w0, v, setup).ratio / expect - 1.0));
    }
    o.require(hi_dev <= 0.01, "ratio = 1 within 1% for omega >= 100 v/z_a");
    o.require(lo_dev <= 0.05, "ratio = 3v/(pi z_a omega) within 5% for omega <= 1e-3 v/z_a");
    o.detail << "max |ratio-1| (omega >= 100 v/z_a) = " << num(hi_dev)
             << "; max rel. dev. from 3v/(pi z_a omega) (omega <= 1e-3 v/z_a) = " << num(lo_dev);
}

// 4. Equilibrium energy and zero-frequency values.
void equilibrium_energy(Outcome& o)
{
    Setup const setup = Setup::make(gold(0.0, 1e-6));
    Scenario const& s = setup.scenario;
    auto const e = total_energy(setup);
    double const rel = std::abs(e.total / (1.5 * s.omega_a) - 1.0);
    o.require(rel <= 1e-3, "E = 1.5 omega_a within 0.1%");
    double const e00 = spectral_energy(0.0, 0.0, setup);
    double const peak = spectral_energy(s.omega_a, 0.0, setup);
    o.require(std::abs(e00) <= s.numerics.rel_tol_quad * peak, "E(0,0) = 0");
    double bm_min = std::numeric_limits<double>::infinity();
    for (double g : {1e-9, 1e-6, 1e-3, 1e-1}) {
        bm_min = std::min(bm_min, bm_spectral_energy(0.0, g, 1.5 * s.alpha0_tilde * s.omega_a, s));
    }
    o.require(bm_min > 0.0, "E_BM(0,0) > 0");
    o.detail << "E/(1.5 hbar omega_a) - 1 = " << num(e.total / (1.5 * s.omega_a) - 1.0) << " (err "
             << num(e.err / (1.5 * s.omega_a)) << "); E(0,0) = " << num(e00)
             << "; min E_BM(0,0) over gamma_a in [1e-9, 0.1] = " << num(bm_min);
}

// 5. Semidefiniteness on a 50-point (omega, v) sample and a 20-point q sample.
void psd_suite(Outcome& o)
{
    double const tol = 1e-10;
    Scenario const base = gold();
    std::vector<double> vs;
    for (double vc : {0.0, 1e-5, 1e-4, 1e-3, -1e-4}) vs.push_back(gold(vc).v);
    std::vector<double> ws;
    for (int i = 0; i < 10; ++i) ws.push_back(1e-6 * std::pow(4e6, i / 9.0));

    struct Family
    {
        std::string name;
        double worst = std::numeric_limits<double>::infinity();
        int bad = 0;
        double bad_omega_max = 0.0;
    };
    std::vector<Family> fam = {{"nu+D"}, {"nu-D"}, {"Sigma"}, {"S"}, {"alpha_Im"}, {"M(q)"}};
    auto record = [&](Family& f, Dyad const& m, double omega) {
        double const tr = std::abs(trace_re(m));
        double const r = tr > 0.0 ? min_eigenvalue(m) / tr : min_eigenvalue(m);
        f.worst = std::min(f.worst, r);
        if (r < -tol) {
            ++f.bad;
            f.bad_omega_max = std::max(f.bad_omega_max, omega);
        }
    };
    for (double v : vs) {
        Setup const setup = Setup::make(base.with_velocity(v));
        for (double w : ws) {
            auto const k = kernel_set(w, v, setup);
            record(fam[0], k.nu_plus.value, w);
            record(fam[1], k.nu_minus.value, w);
            auto const p = sigma_spectrum(w, v, setup);
            record(fam[2], p.sigma, w);
            record(fam[3], p.s, w);
            record(fam[4], p.alpha.alpha_im, w);
        }
    }
    auto const table = Setup::make(base).table;
    for (int i = 0; i < 20; ++i) {
        double const q = (i % 2 ? -1.0 : 1.0) * 1e-3 * std::pow(table->q_max() / 1e-3, i / 19.0);
        record(fam[5], (*table)(q), 0.0);
    }
    for (auto const& f : fam) {
        o.require(f.bad == 0, f.name + " >= -1e-10 trace");
        o.detail << f.name << " min eig/|tr| = " << num(f.worst);
        if (f.bad > 0) o.detail << " (" << f.bad << " of 50 below, up to omega = " << num(f.bad_omega_max) << ")";
        o.detail << "; ";
    }
}

// 6. Stationarity identity and friction parity.
void stationarity(Outcome& o)
{
    Scenario const s = gold(1e-4);
    auto const fp = friction(Setup::make(s));
    auto const fm = friction(Setup::make(s.with_velocity(-s.v)));
    double const odd = std::abs(fp.f_fric + fm.f_fric) / std::abs(fp.f_fric);
    o.require(fp.residual <= 1e-3, "|P_rad + v F|/P_rad <= 1e-3");
    o.require(odd <= 1e-8, "F odd in v");
    o.require(fp.f_fric * s.v < 0.0 && fm.f_fric * (-s.v) < 0.0, "F v < 0");
    o.detail << "|P_rad + v F|/P_rad = " << num(fp.residual) << "; F(v) = " << num(fp.f_fric)
             << ", F(-v) = " << num(fm.f_fric) << " (|F(v)+F(-v)|/|F| = " << num(odd) << ")";
}

// 7. Zero-frequency nonequilibrium signature.
void zero_frequency(Outcome& o)
{
    Scenario const base = gold();
    double even_dev = 0.0;
    double e_min = std::numeric_limits<double>::infinity();
    double lte_max = 0.0;
    for (double vc : {1e-5, 1e-4, 1e-3}) {
        Scenario const s = gold(vc);
        Setup const sp = Setup::make(s);
        Setup const sm = Setup::make(s.with_velocity(-s.v));
        double const ep = spectral_energy(0.0, s.v, sp);
        double const em = spectral_energy(0.0, -s.v, sm);
        e_min = std::min(e_min, ep);
        even_dev = std::max(even_dev, std::abs(ep - em) / ep);
        lte_max = std::max({lte_max, std::abs(spectral_energy(0.0, s.v, sp, NoiseModel::lte)),
                            std::abs(spectral_energy(0.0, -s.v, sm, NoiseModel::lte))});
    }
    lte_max = std::max(lte_max, std::abs(spectral_energy(0.0, 0.0, Setup::make(gold(0.0)), NoiseModel::lte)));
    o.require(e_min > 0.0, "E(0,v) > 0");
    o.require(even_dev <= 1e-8, "E(0,v) even in v");
    o.require(lte_max == 0.0, "E_LTE(0,v) = 0");

    // Sigma(0, v) carries the alpha0^2 scaling; E(0, v) = Tr Sigma(0, v) / (2 pi alpha0)
    // is then linear in alpha0.
    double const a1 = base.alpha0_tilde / 10.0;
    double const a2 = base.alpha0_tilde;
    Setup const s1 = Setup::make(base.with_alpha0_tilde(a1));
    Setup const s2 = Setup::make(base);
    double const ss = slope(a1, trace_re(sigma_spectrum(0.0, base.v, s1).sigma), a2,
                            trace_re(sigma_spectrum(0.0, base.v, s2).sigma));
    double const se = slope(a1, spectral_energy(0.0, base.v, s1), a2, spectral_energy(0.0, base.v, s2));
    o.require(std::abs(ss - 2.0) <= 0.05, "Tr Sigma(0,v) alpha0 slope 2 +- 0.05");
    o.require(std::abs(se - 1.0) <= 0.05, "E(0,v) alpha0 slope 1 +- 0.05");
    o.detail << "min E(0,v) = " << num(e_min) << "; max |E(0,v)-E(0,-v)|/E = " << num(even_dev)
             << "; max |E_LTE(0,v)| = " << num(lte_max) << "; alpha0 slopes: Tr Sigma(0,v) " << num(ss)
             << ", E(0,v) " << num(se);
}

// 8. Time-domain ensemble against the frequency-domain spectrum.
void time_domain(Outcome& o)
{
    int const workers = std::getenv("QFRIC_WORKERS") ? std::max(1, std::atoi(std::getenv("QFRIC_WORKERS"))) : 1;
    {
        Setup const setup = Setup::make(testing_support::broad_resonance(0.0));
        TimeDomainConfig cfg;
        cfg.realizations = 200;
        cfg.workers = workers;
        std::vector<double> edges;
        for (int i = 0; i <= 30; ++i) edges.push_back(0.4 + 0.01 * i);
        auto const r = run_ensemble(setup, 0.0, cfg, edges);
        int bad = 0;
        double worst = 0.0;
        for (auto const& b : r.bins) {
            double const z = std::abs(b.trace - trace_re(b.predicted)) / b.trace_err;
            worst = std::max(worst, z);
            if (z > 3.0) ++bad;
        }
        o.require(bad == 0, "v = 0: every bin within 3 sigma");
        o.detail << "v = 0: " << r.bins.size() << " bins on [0.4, 0.7], " << bad
                 << " outside 3 sigma (max " << num(worst) << " sigma); ";
    }
    {
        double const v = testing_support::broad_resonance(1e-4).v;
        Setup const setup = Setup::make(testing_support::broad_resonance(1e-4));
        TimeDomainConfig cfg;
        cfg.realizations = 200;
        cfg.workers = workers;
        std::vector<double> edges = {0.01};
        for (int i = 0; i < 30; ++i) edges.push_back(0.1 + 0.1 * i);
        auto const r = run_ensemble(setup, v, cfg, edges);
        double worst = 0.0;
        for (auto const& b : r.bins) {
            worst = std::max(worst, std::abs(b.trace / trace_re(b.predicted) - 1.0));
        }
        o.require(worst <= 0.1, "v = 1e-4 c: trace within 10% per bin");
        o.detail << "v = 1e-4 c: " << r.bins.size() << " bins on [0.01, 3.0], max |Tr meas/Tr Sigma - 1| = "
                 << num(worst);
    }
}

struct Criterion
{
    int id;
    std::string name;
    double budget_s;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv)
{
    std::vector<Criterion> const all = {
        {1, "power balance", 120.0, power_balance_grid},
        {2, "LTE imbalance sign and scaling", 300.0, lte_scaling},
        {3, "FDI asymptotes", 60.0, fdi_asymptotes},
        {4, "equilibrium energy", 60.0, equilibrium_energy},
        {5, "PSD suite", 60.0, psd_suite},
        {6, "stationarity identity", 600.0, stationarity},
        {7, "zero-frequency signature", 120.0, zero_frequency},
        {8, "time-domain oracle", 300.0, time_domain},
    };
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failed = 0;
    for (auto const& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        Outcome o;
        auto const t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (std::exception const& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs < c.budget_s, "runtime < " + num(c.budget_s) + " s");
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail.str()
                  << " [" << std::fixed << std::setprecision(1) << secs << " s]" << std::defaultfloat
                  << std::endl;
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
