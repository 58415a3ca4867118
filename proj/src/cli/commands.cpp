#include "qfric/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "qfric/config.hpp"
#include "qfric/errors.hpp"
#include "qfric/kernels.hpp"
#include "qfric/observables.hpp"
#include "qfric/polarizability.hpp"

namespace qfric {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options
{
    std::string config;
    std::string out;
    std::vector<std::string> set;
    std::string dump_dyad;

    int points = 0;
    double omega_min = 0.0;
    double omega_max = 0.0;
    bool born_markov = false;
    bool lte_substitute = false;

    std::string axis;
    double from = 0.0;
    double to = 0.0;
    bool log_spacing = false;
};

int workers_from_env()
{
    char const* env = std::getenv("QFRIC_WORKERS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    long const n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) {
        throw ValidationError("QFRIC_WORKERS must be an integer in [1, 1024]");
    }
    return static_cast<int>(n);
}

std::vector<double> grid(double a, double b, int n, bool logarithmic)
{
    if (n < 1) throw ValidationError("grid: need at least one point");
    if (logarithmic && !(a > 0.0 && b > 0.0)) {
        throw ValidationError("grid: logarithmic spacing needs positive bounds");
    }
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        double const t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        g[i] = logarithmic ? a * std::pow(b / a, t) : a + (b - a) * t;
    }
    if (n > 1) g.back() = b;
    return g;
}

RunConfig resolve_config(Options const& o)
{
    RunConfig cfg = o.config.empty() ? default_config() : load_config(o.config);
    for (auto const& s : o.set) apply_override(cfg, s);
    return cfg;
}

void write_header(std::ostream& os, std::string const& command, RunConfig const& cfg,
                  Scenario const& s, std::string const& units)
{
    os << "# qfric " << QFRIC_VERSION << "\n";
    os << "# command: " << command << "\n";
    os << "# scenario: " << s.describe() << "\n";
    for (auto const& [k, v] : describe_config(cfg)) os << "# config: " << k << " = " << v << "\n";
    os << "# units: " << units << "\n";
}

class CsvRow
{
  public:
    explicit CsvRow(std::ostream& os) : os_(os) {}
    CsvRow& operator<<(double x)
    {
        sep();
        if (std::isnan(x)) {
            os_ << "nan";
        } else {
            os_ << std::setprecision(12) << x;
        }
        return *this;
    }
    CsvRow& operator<<(std::string const& s)
    {
        sep();
        os_ << s;
        return *this;
    }
    ~CsvRow() { os_ << "\n"; }

  private:
    void sep()
    {
        if (!first_) os_ << ",";
        first_ = false;
    }
    std::ostream& os_;
    bool first_ = true;
};

std::string csv_safe(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

// ---------------------------------------------------------------- spectrum

void run_spectrum(Options const& o, RunConfig const& cfg, InternalModel const& m, Setup const& setup,
                  std::ostream& os)
{
    Scenario const& s = m.scenario;
    double const v = s.v;
    int const n = o.points > 0 ? o.points : 200;
    double const lo = o.omega_min > 0.0 ? o.omega_min : 1e-4;
    double const hi = o.omega_max > 0.0 ? o.omega_max : 2.0 * std::max(s.omega_a, 1.0);
    if (!(hi > lo)) throw ValidationError("spectrum: need omega-max > omega-min");
    std::optional<BornMarkovParams> bm;
    if (o.born_markov) bm = born_markov_params(setup, v);

    write_header(os, "spectrum", cfg, s,
                 "omega in omega_sp (omega_si in rad/s); spectral energies in hbar; "
                 "trace_sigma in internal units");
    {
        CsvRow h(os);
        h << std::string("omega") << std::string("omega_si") << std::string("spectral_energy")
          << std::string("spectral_energy_lte") << std::string("trace_sigma");
        if (bm) h << std::string("spectral_energy_bm");
    }
    std::vector<double> omegas = {0.0};
    for (double w : grid(lo, hi, n, true)) omegas.push_back(w);
    for (double w : omegas) {
        auto const p = sigma_spectrum(w, v, setup);
        CsvRow r(os);
        r << w << w * m.scales.frequency << spectral_energy(w, v, setup)
          << spectral_energy(w, v, setup, NoiseModel::lte) << trace_re(p.sigma);
        if (bm) r << bm_spectral_energy(w, bm->gamma_a, bm->d2, s);
    }
}

// ---------------------------------------------------------------- fdi

void run_fdi(Options const& o, RunConfig const& cfg, InternalModel const& m, Setup const& setup,
             std::ostream& os)
{
    Scenario const& s = m.scenario;
    double const v = s.v;
    double const scale = v != 0.0 ? std::abs(v) / s.z_a : 1.0;
    int const n = o.points > 0 ? o.points : 121;
    double const lo = o.omega_min > 0.0 ? o.omega_min : 1e-4 * scale;
    double const hi = o.omega_max > 0.0 ? o.omega_max : 1e4 * scale;
    if (!(hi > lo)) throw ValidationError("fdi: need omega-max > omega-min");
    write_header(os, "fdi", cfg, s, "omega in omega_sp; kernels in internal units");
    CsvRow(os) << std::string("omega") << std::string("omega_z_over_v") << std::string("trace_nu")
               << std::string("trace_d") << std::string("ratio") << std::string("asymptote")
               << std::string("min_eig_nu_plus_d") << std::string("min_eig_nu_minus_d");
    for (double w : grid(lo, hi, n, true)) {
        auto const k = kernel_set(w, v, setup);
        auto const f = fdi_ratio(w, v, setup);
        CsvRow(os) << w << (v != 0.0 ? w * s.z_a / std::abs(v) : kNaN) << trace_re(k.nu.value)
                   << trace_re(k.dissipation()) << f.ratio << f.asymptote
                   << min_eigenvalue(k.nu_plus.value) << min_eigenvalue(k.nu_minus.value);
    }
}

// ---------------------------------------------------------------- power

void run_power(Options const&, RunConfig const& cfg, InternalModel const& m, Setup const& setup,
               std::ostream& os)
{
    auto const r = lte_power(setup);
    double const pw = m.scales.power();
    write_header(os, "power", cfg, m.scenario,
                 "powers in hbar omega_sp^2 (the _si columns in W)");
    CsvRow(os) << std::string("v") << std::string("p_in") << std::string("err_in")
               << std::string("p_out") << std::string("err_out") << std::string("p_net")
               << std::string("p_lte") << std::string("err_lte") << std::string("p_lte_asymptotic")
               << std::string("p_in_si") << std::string("p_out_si") << std::string("p_lte_si")
               << std::string("p_lte_asymptotic_si");
    CsvRow(os) << r.v << r.p_in << r.err_in << r.p_out << r.err_out << r.p_net << r.p_lte << r.err_lte
               << r.p_lte_asymptotic << r.p_in * pw << r.p_out * pw << r.p_lte * pw
               << r.p_lte_asymptotic * pw;
}

// ---------------------------------------------------------------- friction

void run_friction(Options const&, RunConfig const& cfg, InternalModel const& m, Setup const& setup,
                  std::ostream& os)
{
    auto const r = friction(setup);
    write_header(os, "friction", cfg, m.scenario,
                 "force in hbar omega_sp / z_a, power in hbar omega_sp^2 (the _si columns in N and W)");
    CsvRow(os) << std::string("v") << std::string("f_fric") << std::string("err_f")
               << std::string("p_rad") << std::string("err_rad") << std::string("p_ext")
               << std::string("residual") << std::string("interpolation_err")
               << std::string("f_fric_si") << std::string("p_rad_si");
    CsvRow(os) << r.v << r.f_fric << r.err_f << r.p_rad << r.err_rad << r.p_ext << r.residual
               << r.interpolation_err << r.f_fric * m.scales.force() << r.p_rad * m.scales.power();
}

// ---------------------------------------------------------------- checks

struct Verdict
{
    std::string name;
    bool pass;
    std::string detail;
};

std::string fmt(double x)
{
    std::ostringstream os;
    os << std::setprecision(4) << x;
    return os.str();
}

std::vector<Verdict> checks(Setup const& setup, bool lte_substitute)
{
    Scenario const& s = setup.scenario;
    double const v = s.v;
    double const tol = s.numerics.psd_tol;
    std::vector<Verdict> out;

    {
        NoiseModel const model = lte_substitute ? NoiseModel::lte : NoiseModel::exact;
        auto const r = power_balance(setup, model);
        double const bound = std::max(1e-4 * r.p_in, 3.0 * r.err_net);
        // The direct difference is limited by rounding of P_in; the resolved
        // balance measures both sides from the LTE output power.
        auto const b = resolved_balance(setup, model);
        double const rbound = 1e-3 * std::abs(b.in_excess) + 3.0 * (b.err_in + b.err_out);
        out.push_back({"power_balance", std::abs(r.p_net) <= bound && std::abs(b.imbalance) <= rbound,
                       "P_in=" + fmt(r.p_in) + " P_out=" + fmt(r.p_out) + " P_in-P_out=" + fmt(r.p_net)
                           + " (bound " + fmt(bound) + "); resolved P_in-P_out=" + fmt(b.imbalance)
                           + " (bound " + fmt(rbound) + ", P_LTE=" + fmt(b.in_excess) + ")"});
    }
    auto const lte = lte_power(setup);
    if (v != 0.0) {
        out.push_back({"lte_imbalance_positive", lte.p_lte > 0.0, "P_LTE=" + fmt(lte.p_lte)});
        if (std::abs(v) / s.z_a <= 1e-3) {
            double const ratio = lte.p_lte / lte.p_lte_asymptotic;
            out.push_back({"lte_low_velocity_asymptote", std::abs(ratio - 1.0) <= 0.1,
                           "P_LTE/asymptote=" + fmt(ratio)});
        }
    } else {
        out.push_back({"lte_imbalance_zero", lte.p_lte == 0.0, "P_LTE=" + fmt(lte.p_lte)});
    }

    // Fluctuation-dissipation inequality on a log grid.
    {
        double const scale = v != 0.0 ? std::abs(v) / s.z_a : 1e-3;
        double worst = std::numeric_limits<double>::infinity();
        double worst_ratio = std::numeric_limits<double>::infinity();
        double max_dev = 0.0;
        for (double w : grid(1e-3 * scale, 10.0 * std::max(1.0, s.omega_a), 40, true)) {
            auto const k = kernel_set(w, v, setup);
            double const tr = trace_re(k.nu.value);
            worst = std::min({worst, min_eigenvalue(k.nu_plus.value) / tr,
                              min_eigenvalue(k.nu_minus.value) / tr});
            double const ratio = tr / std::abs(trace_re(k.dissipation()));
            worst_ratio = std::min(worst_ratio, ratio);
            max_dev = std::max(max_dev, std::abs(ratio - 1.0));
        }
        out.push_back({"fdi_psd", worst >= -tol && worst_ratio >= 1.0 - 1e-8,
                       "min eig(nu+-D)/Tr nu=" + fmt(worst) + " min Tr nu/|Tr D|=" + fmt(worst_ratio)});
        if (v != 0.0) {
            double const av = std::abs(v) / s.z_a;
            auto const hi = fdi_ratio(100.0 * av, v, setup);
            auto const lo = fdi_ratio(1e-3 * av, v, setup);
            double const dlo = std::abs(lo.ratio / lo.asymptote - 1.0);
            double const dhi = std::abs(hi.ratio - 1.0);
            out.push_back({"fdi_asymptotes", dhi <= 0.01 && dlo <= 0.05,
                           "|ratio-1| at 100v/z_a=" + fmt(dhi) + ", rel. dev. from 3v/(pi z_a omega) at 1e-3 v/z_a="
                               + fmt(dlo)});
        } else {
            out.push_back({"fdi_equilibrium", max_dev <= 1e-8, "max |Tr nu/|Tr D| - 1|=" + fmt(max_dev)});
        }
    }

    // Parity and stationarity.
    {
        auto const fp = friction(setup);
        if (v != 0.0) {
            Setup const mirror{s.with_velocity(-v), setup.table};
            auto const fm = friction(mirror);
            double const odd = std::abs(fp.f_fric + fm.f_fric) / std::abs(fp.f_fric);
            out.push_back({"friction_odd", odd <= 1e-6 && fp.f_fric * v < 0.0,
                           "F(v)=" + fmt(fp.f_fric) + " F(-v)=" + fmt(fm.f_fric)});
            out.push_back({"stationarity", fp.residual <= 1e-3,
                           "|P_rad + v F|/P_rad=" + fmt(fp.residual)});
            double const ep = spectral_energy(0.0, v, setup);
            double const em = spectral_energy(0.0, -v, mirror);
            out.push_back({"zero_frequency_even", std::abs(ep - em) <= 1e-8 * std::abs(ep) && ep > 0.0,
                           "E(0,v)=" + fmt(ep) + " E(0,-v)=" + fmt(em)});
        } else {
            out.push_back({"friction_zero", fp.f_fric == 0.0, "F=" + fmt(fp.f_fric)});
            double const e0 = spectral_energy(0.0, 0.0, setup);
            out.push_back({"zero_frequency_zero", e0 == 0.0, "E(0,0)=" + fmt(e0)});
        }
        double const el = spectral_energy(0.0, v, setup, NoiseModel::lte);
        out.push_back({"zero_frequency_lte", el == 0.0, "E_LTE(0,v)=" + fmt(el)});
    }
    return out;
}

int run_checks(Options const& o, RunConfig const& cfg, InternalModel const& m, Setup const& setup,
               std::ostream& os)
{
    auto const verdicts = checks(setup, o.lte_substitute);
    os << "# qfric " << QFRIC_VERSION << " checks\n";
    os << "# scenario: " << m.scenario.describe() << "\n";
    for (auto const& [k, v] : describe_config(cfg)) os << "# config: " << k << " = " << v << "\n";
    int failed = 0;
    for (auto const& v : verdicts) {
        os << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
        if (!v.pass) ++failed;
    }
    os << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << "\n";
    return failed == 0 ? exit_ok : exit_invariant;
}

// ---------------------------------------------------------------- sweep

struct SweepRow
{
    double value = 0.0;
    std::string status = "ok";
    bool failed = false;
    std::vector<double> data;
};

std::vector<std::string> const& sweep_columns()
{
    static std::vector<std::string> const cols = {
        "v",          "alpha0_tilde", "z_a_si",     "omega_a",        "p_in_si",
        "err_in_si",  "p_out_si",     "err_out_si", "p_lte_si",       "err_lte_si",
        "p_lte_asymptotic_si",        "f_fric_si",  "err_f_si",       "p_rad_si",
        "residual",   "energy_si",    "err_energy_si", "zero_frequency_energy_si"};
    return cols;
}

std::vector<double> sweep_point(RunConfig cfg, std::string const& key, double value)
{
    std::ostringstream vs;
    vs << std::setprecision(17) << value;
    apply_setting(cfg, key, vs.str());
    InternalModel const m = to_internal(cfg.si, cfg.numerics);
    m.scenario.validate();
    Setup const setup = Setup::make(m.scenario);
    UnitScales const& u = m.scales;
    auto const p = lte_power(setup);
    auto const f = friction(setup);
    auto const e = total_energy(setup);
    Scenario const& s = m.scenario;
    return {s.v,
            s.alpha0_tilde,
            u.length,
            s.omega_a,
            p.p_in * u.power(),
            p.err_in * u.power(),
            p.p_out * u.power(),
            p.err_out * u.power(),
            p.p_lte * u.power(),
            p.err_lte * u.power(),
            p.p_lte_asymptotic * u.power(),
            f.f_fric * u.force(),
            f.err_f * u.force(),
            f.p_rad * u.power(),
            f.residual,
            e.total * u.energy(),
            e.err * u.energy(),
            e.zero_frequency * si::hbar};
}

int run_sweep(Options const& o, RunConfig const& cfg, InternalModel const& m, std::ostream& os,
              std::ostream& log, int workers)
{
    static std::map<std::string, std::string> const keys = {{"v", "motion.v_over_c"},
                                                            {"alpha0", "atom.alpha0_si"},
                                                            {"za", "geometry.za_si"},
                                                            {"omega_a", "atom.omega_a_si"}};
    auto const it = keys.find(o.axis);
    if (it == keys.end()) throw ValidationError("sweep: unknown axis '" + o.axis + "'");
    if (o.points < 1) throw ValidationError("sweep: --points must be >= 1");
    auto const values = grid(o.from, o.to, o.points, o.log_spacing);

    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t const i = next++;
            if (i >= values.size()) return;
            SweepRow& row = rows[i];
            row.value = values[i];
            try {
                row.data = sweep_point(cfg, it->second, values[i]);
            } catch (std::exception const& e) {
                row.failed = true;
                row.status = csv_safe(std::string("error: ") + e.what());
                row.data.assign(sweep_columns().size(), kNaN);
            }
        }
    };
    int const nw = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    write_header(os, "sweep --axis " + o.axis, cfg, m.scenario,
                 "axis value in config units; v and omega_a internal; SI columns in m, W, N, J, J s");
    {
        CsvRow h(os);
        h << it->second;
        for (auto const& c : sweep_columns()) h << c;
        h << std::string("status");
    }
    int failures = 0;
    for (auto const& row : rows) {
        CsvRow r(os);
        r << row.value;
        for (double x : row.data) r << x;
        r << row.status;
        if (row.failed) {
            ++failures;
            log << "[qfric] sweep point " << row.value << " failed: " << row.status << "\n";
        }
    }
    return failures == 0 ? exit_ok : exit_convergence;
}

}  // namespace

int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& log)
{
    CLI::App app{"Nonequilibrium steady state of an atom moving above a Drude metal", "qfric"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "Configuration file (key = value lines)");
    app.add_option("--out", o.out, "Write CSV here instead of standard output");
    app.add_option("--set", o.set, "Override a configuration key: key=value")->allow_extra_args(false);
    app.add_option("--dump-geometric-dyad", o.dump_dyad, "Write the geometric dyad table as CSV");

    auto* spectrum = app.add_subcommand("spectrum", "Spectral energy density, exact and LTE");
    spectrum->add_option("--points", o.points, "Logarithmic grid points (default 200)");
    spectrum->add_option("--omega-min", o.omega_min, "Lowest nonzero frequency, units of omega_sp");
    spectrum->add_option("--omega-max", o.omega_max, "Highest frequency, units of omega_sp");
    spectrum->add_flag("--born-markov", o.born_markov, "Add the Born-Markov curve");

    auto* fdi = app.add_subcommand("fdi", "Fluctuation-dissipation ratio Tr nu / |Tr D|");
    fdi->add_option("--points", o.points, "Logarithmic grid points (default 121)");
    fdi->add_option("--omega-min", o.omega_min, "Lowest frequency, units of omega_sp");
    fdi->add_option("--omega-max", o.omega_max, "Highest frequency, units of omega_sp");

    app.add_subcommand("power", "Power balance and LTE imbalance");
    app.add_subcommand("friction", "Friction force and radiated power");
    auto* chk = app.add_subcommand("checks", "Invariant suite; exit 3 on any violation");
    chk->add_flag("--lte-substitute", o.lte_substitute)->group("");

    auto* sweep = app.add_subcommand("sweep", "Scalar observables along one parameter axis");
    sweep->add_option("--axis", o.axis, "v | alpha0 | za | omega_a")->required();
    sweep->add_option("--from", o.from, "First value, config units")->required();
    sweep->add_option("--to", o.to, "Last value, config units")->required();
    sweep->add_option("--points", o.points, "Number of points")->required();
    sweep->add_flag("--log", o.log_spacing, "Logarithmic spacing");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e, out, log);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        RunConfig const cfg = resolve_config(o);
        InternalModel const m = to_internal(cfg.si, cfg.numerics);
        m.scenario.validate();
        log << "[qfric] scenario: " << m.scenario.describe() << "\n";
        if (!m.scenario.weak_coupling()) {
            log << "[qfric] warning: alpha0_tilde = " << m.scenario.alpha0_tilde
                << " exceeds the weak-coupling threshold " << m.scenario.numerics.alpha_warn << "\n";
        }
        int const workers = workers_from_env();
        Setup const setup = Setup::make(m.scenario);

        if (!o.dump_dyad.empty()) {
            std::ofstream f(o.dump_dyad);
            if (!f) throw ValidationError("cannot open " + o.dump_dyad);
            setup.table->dump_csv(f);
        }

        std::unique_ptr<std::ofstream> file;
        if (!o.out.empty()) {
            file = std::make_unique<std::ofstream>(o.out);
            if (!*file) throw ValidationError("cannot open " + o.out);
        }
        std::ostream& os = file ? *file : out;

        auto const* sub = app.get_subcommands().front();
        std::string const name = sub->get_name();
        int code = exit_ok;
        if (name == "spectrum") {
            run_spectrum(o, cfg, m, setup, os);
        } else if (name == "fdi") {
            run_fdi(o, cfg, m, setup, os);
        } else if (name == "power") {
            run_power(o, cfg, m, setup, os);
        } else if (name == "friction") {
            run_friction(o, cfg, m, setup, os);
        } else if (name == "checks") {
            code = run_checks(o, cfg, m, setup, os);
        } else if (name == "sweep") {
            code = run_sweep(o, cfg, m, os, log, workers);
        }
        os.flush();
        return code;
    } catch (ValidationError const& e) {
        log << "qfric: " << e.what() << "\n";
        return exit_usage;
    } catch (DomainError const& e) {
        log << "qfric: " << e.what() << "\n";
        return exit_usage;
    } catch (ConvergenceError const& e) {
        log << "qfric: " << e.what() << " (estimate " << e.estimate() << ", error bound "
            << e.error_bound() << ")\n";
        return exit_convergence;
    } catch (SingularityError const& e) {
        log << "qfric: " << e.what() << "\n";
        return exit_convergence;
    } catch (InvariantError const& e) {
        log << "qfric: " << e.what() << "\n";
        return exit_invariant;
    } catch (std::exception const& e) {
        log << "qfric: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace qfric
