#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qfric/cli.hpp"
#include "qfric/config.hpp"

using namespace qfric;

namespace {

struct Run
{
    int code;
    std::string out;
    std::string log;
};

Run run(std::vector<std::string> const& args)
{
    std::ostringstream out, log;
    int const code = run_cli(args, out, log);
    return {code, out.str(), log.str()};
}

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string const& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        FAIL("missing column " << name);
        return -1;
    }
    double at(std::size_t row, std::string const& name) const
    {
        return std::stod(rows.at(row).at(column(name)));
    }
};

std::vector<std::string> split(std::string const& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

Table parse_csv(std::string const& text)
{
    Table t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty()) {
            t.header = split(line);
        } else {
            t.rows.push_back(split(line));
        }
    }
    return t;
}

std::string alpha0_scaled(double factor)
{
    std::ostringstream os;
    os.precision(17);
    os << "atom.alpha0_si=" << default_config().si.alpha0_si * factor;
    return os.str();
}

}  // namespace

TEST_CASE("cli: usage errors exit 1, help exits 0")
{
    CHECK(run({}).code == exit_usage);
    CHECK(run({"--help"}).code == exit_ok);
    CHECK(run({"bogus"}).code == exit_usage);
    CHECK(run({"--set", "foo.bar=1", "power"}).code == exit_usage);
    CHECK(run({"--set", "geometry.za_si", "power"}).code == exit_usage);
    CHECK(run({"--config", "/nonexistent/qfric.conf", "power"}).code == exit_usage);
    CHECK(run({"sweep", "--axis", "q", "--from", "0", "--to", "1", "--points", "2"}).code == exit_usage);
    CHECK(run({"sweep", "--axis", "v", "--from", "0", "--to", "1e-4", "--points", "3", "--log"}).code
          == exit_usage);
    CHECK(run({"spectrum", "--omega-min", "2", "--omega-max", "1"}).code == exit_usage);
}

TEST_CASE("cli: header, scenario log and determinism")
{
    auto const a = run({"power"});
    auto const b = run({"power"});
    REQUIRE(a.code == exit_ok);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("# qfric " QFRIC_VERSION "\n", 0) == 0);
    CHECK(a.out.find("# scenario: omega_a=") != std::string::npos);
    CHECK(a.out.find("# config: motion.v_over_c = ") != std::string::npos);
    CHECK(a.log.find("[qfric] scenario: ") != std::string::npos);
    auto const t = parse_csv(a.out);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.at(0, "p_in") > 0.0);
    CHECK(t.at(0, "p_lte") > 0.0);
    CHECK(std::abs(t.at(0, "p_in_si") / t.at(0, "p_in") - t.at(0, "p_out_si") / t.at(0, "p_out")) < 1e-12);
}

TEST_CASE("cli: --out and --dump-geometric-dyad write files")
{
    std::string const out = "cli_test_out.csv";
    std::string const dyad = "cli_test_dyad.csv";
    auto const r = run({"--out", out, "--dump-geometric-dyad", dyad, "friction"});
    REQUIRE(r.code == exit_ok);
    CHECK(r.out.empty());
    std::ifstream f(out);
    std::stringstream ss;
    ss << f.rdbuf();
    auto const t = parse_csv(ss.str());
    REQUIRE(t.rows.size() == 1);
    CHECK(t.at(0, "f_fric") < 0.0);
    CHECK(t.at(0, "residual") < 1e-3);
    std::ifstream g(dyad);
    std::string first;
    std::getline(g, first);
    CHECK(!first.empty());
    std::remove(out.c_str());
    std::remove(dyad.c_str());
}

TEST_CASE("cli: checks pass by default and fail under LTE substitution")
{
    auto const ok = run({"checks"});
    CHECK(ok.code == exit_ok);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    CHECK(ok.out.find("PASS power_balance") != std::string::npos);

    auto const bad = run({"checks", "--lte-substitute"});
    CHECK(bad.code == exit_invariant);
    CHECK(bad.out.find("FAIL power_balance") != std::string::npos);

    auto const eq = run({"--set", "motion.v_over_c=0", "checks"});
    CHECK(eq.code == exit_ok);
    CHECK(eq.out.find("PASS lte_imbalance_zero: P_LTE=0") != std::string::npos);
    CHECK(eq.out.find("PASS friction_zero: F=0") != std::string::npos);
    CHECK(eq.out.find("PASS zero_frequency_zero: E(0,0)=0") != std::string::npos);
}

TEST_CASE("cli: spectrum curves")
{
    SUBCASE("moving atom: separate at low frequency, merge at high frequency")
    {
        auto const r = run({"spectrum", "--points", "40", "--born-markov"});
        REQUIRE(r.code == exit_ok);
        auto const t = parse_csv(r.out);
        REQUIRE(t.rows.size() == 41);
        CHECK(t.at(0, "omega") == 0.0);
        CHECK(t.at(0, "spectral_energy") > 0.0);
        CHECK(t.at(0, "spectral_energy_lte") == 0.0);
        CHECK(t.at(0, "spectral_energy_bm") > 0.0);
        std::size_t const last = t.rows.size() - 1;
        double const e = t.at(last, "spectral_energy");
        CHECK(std::abs(e - t.at(last, "spectral_energy_lte")) < 1e-6 * e);
    }
    SUBCASE("v = 0: curves coincide")
    {
        auto const r = run({"--set", "motion.v_over_c=0", "spectrum", "--points", "30"});
        REQUIRE(r.code == exit_ok);
        auto const t = parse_csv(r.out);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            double const e = t.at(i, "spectral_energy");
            CHECK(std::abs(e - t.at(i, "spectral_energy_lte")) <= 1e-10 * std::abs(e));
        }
    }
    SUBCASE("alpha0 halved: Tr Sigma(0) scales by 1/4, E(0, v) by 1/2")
    {
        auto const full = parse_csv(run({"spectrum", "--points", "2"}).out);
        auto const half = parse_csv(run({"--set", alpha0_scaled(0.5), "spectrum", "--points", "2"}).out);
        double const rs = half.at(0, "trace_sigma") / full.at(0, "trace_sigma");
        double const re = half.at(0, "spectral_energy") / full.at(0, "spectral_energy");
        CHECK(rs == doctest::Approx(0.25).epsilon(0.02));
        CHECK(re == doctest::Approx(0.5).epsilon(0.02));
    }
}

TEST_CASE("cli: fdi columns")
{
    auto const r = run({"fdi", "--points", "9"});
    REQUIRE(r.code == exit_ok);
    auto const t = parse_csv(r.out);
    REQUIRE(t.rows.size() == 9);
    CHECK(t.at(0, "ratio") == doctest::Approx(t.at(0, "asymptote")).epsilon(0.05));
    CHECK(t.at(8, "ratio") == doctest::Approx(1.0).epsilon(0.01));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.at(i, "ratio") >= 1.0 - 1e-12);
        CHECK(t.at(i, "min_eig_nu_minus_d") >= -1e-10 * t.at(i, "trace_nu"));
    }
}

TEST_CASE("cli: sweeps")
{
    SUBCASE("v-sweep: friction odd, rows in input order, worker count irrelevant")
    {
        std::vector<std::string> const args = {"sweep", "--axis", "v", "--from", "-1e-4", "--to", "1e-4",
                                               "--points", "5"};
        auto const r = run(args);
        REQUIRE(r.code == exit_ok);
        auto const t = parse_csv(r.out);
        REQUIRE(t.rows.size() == 5);
        CHECK(t.header.front() == "motion.v_over_c");
        CHECK(t.header.back() == "status");
        for (std::size_t i = 0; i < 5; ++i) {
            double const f = t.at(i, "f_fric_si");
            double const g = t.at(4 - i, "f_fric_si");
            CHECK(std::abs(f + g) <= 1e-8 * std::abs(f));
            CHECK(t.at(i, "motion.v_over_c") == doctest::Approx(-1e-4 + 5e-5 * i).epsilon(1e-12));
        }
        CHECK(t.at(2, "f_fric_si") == 0.0);
        CHECK(t.at(4, "f_fric_si") < 0.0);
        setenv("QFRIC_WORKERS", "3", 1);
        auto const par = run(args);
        unsetenv("QFRIC_WORKERS");
        CHECK(par.out == r.out);
    }
    SUBCASE("alpha0 sweep: LTE power slope 2")
    {
        auto const r = run({"sweep", "--axis", "alpha0", "--from", "1e-42", "--to", "1e-41", "--points", "2",
                            "--log"});
        REQUIRE(r.code == exit_ok);
        auto const t = parse_csv(r.out);
        double const slope = std::log10(t.at(1, "p_lte_si") / t.at(0, "p_lte_si"));
        CHECK(slope == doctest::Approx(2.0).epsilon(0.025));
    }
    SUBCASE("failed point: NaN row, sweep continues, exit 2")
    {
        auto const r = run({"sweep", "--axis", "za", "--from", "-1e-9", "--to", "1e-9", "--points", "2"});
        CHECK(r.code == exit_convergence);
        auto const t = parse_csv(r.out);
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[0][t.column("p_in_si")] == "nan");
        CHECK(t.rows[0].back().rfind("error: ", 0) == 0);
        CHECK(t.rows[1].back() == "ok");
        CHECK(t.at(1, "p_in_si") > 0.0);
    }
    SUBCASE("bad worker count")
    {
        setenv("QFRIC_WORKERS", "zero", 1);
        CHECK(run({"power"}).code == exit_usage);
        unsetenv("QFRIC_WORKERS");
    }
}
