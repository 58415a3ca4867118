#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qfric/errors.hpp"
#include "qfric/material.hpp"

using namespace qfric;

TEST_CASE("epsilon")
{
    MaterialParams m{1.0, 0.1};
    // by hand: 1 - 1/(0.25 + 0.05i) = 1 - (0.25 - 0.05i)/0.065
    cplx const expect = 1.0 - cplx(0.25, -0.05) / 0.065;
    CHECK(std::abs(epsilon(m, 0.5) - expect) < 1e-14);
    CHECK(std::abs(epsilon(m, -0.5) - std::conj(epsilon(m, 0.5))) < 1e-14);
    CHECK(std::abs(epsilon(m, 1e8) - 1.0) < 1e-12);
    MaterialParams lossless{1.0, 1e-12};
    CHECK(std::abs(epsilon(lossless, 1.0)) < 1e-10);
    CHECK_THROWS_AS(epsilon(m, 0.0), DomainError);
}

TEST_CASE("r_tm closed form")
{
    MaterialParams m{std::sqrt(2.0), 0.3};
    double const wsp = 1.0;
    CHECK(std::abs(r_tm(m, wsp) - cplx(0, wsp / 0.3)) < 1e-14);
    CHECK(std::abs(r_tm(m, 1e9)) < 1e-17);
    CHECK(std::abs(r_tm(m, 0.0) - 1.0) < 1e-15);
    // (eps - 1)/(eps + 1) equals the plasmon-pole form
    for (double w : {0.1, 0.7, 1.3, 5.0}) {
        cplx const e = epsilon(m, w);
        CHECK(std::abs(r_tm(m, w) - (e - 1.0) / (e + 1.0)) < 1e-13);
        CHECK(std::abs(r_tm(m, w) - oracle::drude_r(1.0, 0.3, w)) < 1e-14);
    }
    MaterialParams lossless{std::sqrt(2.0), 0.0};
    CHECK_THROWS_AS(r_tm(lossless, 1.0), DomainError);
}

TEST_CASE("reality and passivity for random frequencies")
{
    MaterialParams m{std::sqrt(2.0), 0.05};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 2.0);
    for (int i = 0; i < 10000; ++i) {
        double const w = std::pow(10.0, u(rng));
        cplx const p = r_tm(m, w);
        cplx const n = r_tm(m, -w);
        CHECK(std::abs(n - std::conj(p)) <= 1e-15 * std::abs(p));
        CHECK(im_r_tm(m, w) > 0.0);
        CHECK(im_r_tm(m, w) == doctest::Approx(p.imag()).epsilon(1e-13));
        CHECK(im_r_tm(m, -w) == -im_r_tm(m, w));
    }
    CHECK(im_r_tm(m, 0.0) == 0.0);
}

TEST_CASE("resistivity slope")
{
    CHECK(resistivity_slope(MaterialParams{std::sqrt(2.0), 1.0}) == doctest::Approx(1.0));
    MaterialParams m{std::sqrt(2.0), 0.02};
    MaterialParams m2{std::sqrt(2.0), 0.04};
    CHECK(resistivity_slope(m2) == doctest::Approx(2 * resistivity_slope(m)).epsilon(1e-15));
    // finite-difference oracle at 1e-6 omega_sp
    double const w = 1e-6;
    double const fd = oracle::derivative([&](double x) { return oracle::drude_r(1.0, 0.02, x).imag(); },
                                         w, 1e-8);
    CHECK(std::abs(fd - resistivity_slope(m)) <= 1e-3 * resistivity_slope(m));
    // asymptotic window omega < 1e-3 min(omega_sp, omega_sp^2/Gamma)
    for (double g : {0.02, 3.0}) {
        MaterialParams mm{std::sqrt(2.0), g};
        double const wmax = 1e-3 * std::min(1.0, 1.0 / g);
        for (double f : {1e-6, 1e-3, 0.3, 1.0}) {
            double const x = f * wmax;
            double const s = resistivity_slope(mm) * x;
            CHECK(std::abs(im_r_tm(mm, x) - s) < 1e-3 * s);
        }
    }
}

TEST_CASE("Kramers-Kronig consistency of the closed form")
{
    MaterialParams m{std::sqrt(2.0), 0.1};
    auto im = [&](double x) { return oracle::drude_r(1.0, 0.1, x).imag(); };
    for (double w : {0.01, 0.1, 0.5, 0.9, 1.0, 1.2, 3.0, 10.0}) {
        double const kk = oracle::kramers_kronig_re(im, w, 2000.0, 4000000);
        double const re = r_tm(m, w).real();
        CAPTURE(w);
        CHECK(std::abs(kk - re) <= 1e-3 * std::abs(r_tm(m, w)));
    }
}
