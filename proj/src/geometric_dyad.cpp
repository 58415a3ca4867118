#include "qfric/geometric_dyad.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qfric/errors.hpp"
#include "qfric/material.hpp"
#include "qfric/quadrature.hpp"

namespace qfric {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(-2 p z) < 1e-18 beyond this many z-units of 2 p z.
constexpr double kEnvelopeExponent = 41.45;
constexpr double kQMinTable = 1e-9;

using Quad4 = ValueArray<double, 4>;

}  // namespace

Dyad DyadComponents::to_dyad() const
{
    Dyad m = Dyad::Zero();
    m(kX, kX) = xx;
    m(kY, kY) = yy;
    m(kZ, kZ) = zz;
    m(kX, kZ) = cplx(0.0, -xz);
    m(kZ, kX) = cplx(0.0, xz);
    return m;
}

DyadComponents geometric_components(double q, double za, double rel_tol)
{
    if (!(za > 0.0)) {
        throw DomainError("geometric_dyad: za must be positive");
    }
    double const aq = std::abs(q);
    double const reach = aq + kEnvelopeExponent / (2.0 * za);
    double const y_max = std::sqrt(reach * reach - aq * aq);
    // Factor exp(-2|q| za) is pulled out to keep relative accuracy at large q.
    auto f = [&](double y) {
        double const p = std::hypot(q, y);
        double const w = std::exp(-2.0 * (p - aq) * za) / kPi;  // doubled: dp_y/(2 pi) on [0, inf)
        Quad4 r;
        if (p == 0.0) {
            return r;
        }
        r.v[0] = w * 0.5 * q * q / p;
        r.v[1] = w * 0.5 * y * y / p;
        r.v[2] = w * 0.5 * p;
        r.v[3] = w * 0.5 * q;
        return r;
    };
    std::array<double, 4> bp = {0.1 * aq, aq, 4.0 * aq, 1.0 / za};
    QuadOptions opts;
    opts.rel_tol = rel_tol;
    opts.max_panels = 4000;
    auto res = integrate<Quad4>(f, 0.0, y_max, bp, opts);
    double const env = std::exp(-2.0 * aq * za);
    return {res.value.v[0] * env, res.value.v[1] * env, res.value.v[2] * env,
            res.value.v[3] * env};
}

GeometricDyad geometric_dyad(double q, double za, double rel_tol)
{
    return {q, za, geometric_components(q, za, rel_tol).to_dyad()};
}

DyadComponents geometric_components_closed_form(double q, double za)
{
    if (!(za > 0.0)) {
        throw DomainError("geometric_dyad: za must be positive");
    }
    double const aq = std::abs(q);
    if (aq == 0.0) {
        double const c0 = 1.0 / (8.0 * kPi * za * za);
        return {0.0, c0, c0, 0.0};
    }
    double const x = 2.0 * za * aq;
    double const k0 = std::cyl_bessel_k(0.0, x);
    double const k1 = std::cyl_bessel_k(1.0, x);
    double const pref = q * q / (2.0 * kPi);
    DyadComponents c;
    c.xx = pref * k0;
    c.yy = pref * k1 / x;
    c.zz = pref * (k0 + k1 / x);
    c.xz = q * aq * k1 / (2.0 * kPi);
    return c;
}

std::shared_ptr<GeometricDyadTable const> GeometricDyadTable::build(double za, double q_max,
                                                                    int points)
{
    if (!(za > 0.0) || !(q_max > 0.0) || points < 16) {
        throw ValidationError("GeometricDyadTable: invalid za, q_max or size");
    }
    std::shared_ptr<GeometricDyadTable> t(new GeometricDyadTable());
    t->za_ = za;
    t->q_max_ = q_max;
    double const u_hi = std::log(q_max * 1.05);
    t->u_lo_ = std::log(kQMinTable);
    t->du_ = (u_hi - t->u_lo_) / (points - 1);
    t->scaled_.resize(points);
    for (int i = 0; i < points; ++i) {
        double const q = std::exp(t->u_lo_ + i * t->du_);
        DyadComponents c = geometric_components(q, za);
        double const s = std::exp(2.0 * q * za);
        t->scaled_[i] = {c.xx * s, c.yy * s, c.zz * s, c.xz * s};
    }

    // Diagonal of int dq/2pi M; the xz entry is odd in q and vanishes.
    auto f = [&](double q) {
        DyadComponents c = t->components(q);
        Quad4 r;
        r.v = {c.xx, c.yy, c.zz, 0.0};
        return r * (1.0 / kPi);  // (1/2pi) * 2 for the q < 0 half
    };
    std::array<double, 3> bp = {0.01 / za, 0.1 / za, 1.0 / za};
    QuadOptions opts;
    opts.rel_tol = 1e-13;
    auto res = integrate<Quad4>(f, 0.0, q_max, bp, opts);
    t->integrated_ = DyadComponents{res.value.v[0], res.value.v[1], res.value.v[2], 0.0}.to_dyad();
    return t;
}

DyadComponents GeometricDyadTable::components(double q) const
{
    double const aq = std::abs(q);
    double const u = aq > 0.0 ? std::log(aq) : -1e300;
    double const pos = (u - u_lo_) / du_;
    int const n = static_cast<int>(scaled_.size());
    if (!(pos >= 1.0) || pos > n - 3) {
        return geometric_components(q, za_);
    }
    int const i = static_cast<int>(pos);
    double const t = pos - i;
    // Four-point Lagrange weights on nodes i-1 .. i+2.
    double const w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    double const w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    double const w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    double const w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    auto const& a = scaled_[i - 1];
    auto const& b = scaled_[i];
    auto const& c = scaled_[i + 1];
    auto const& d = scaled_[i + 2];
    double const env = std::exp(-2.0 * aq * za_);
    DyadComponents r;
    r.xx = env * (w0 * a.xx + w1 * b.xx + w2 * c.xx + w3 * d.xx);
    r.yy = env * (w0 * a.yy + w1 * b.yy + w2 * c.yy + w3 * d.yy);
    r.zz = env * (w0 * a.zz + w1 * b.zz + w2 * c.zz + w3 * d.zz);
    double const xz = env * (w0 * a.xz + w1 * b.xz + w2 * c.xz + w3 * d.xz);
    r.xz = q < 0.0 ? -xz : xz;
    return r;
}

void GeometricDyadTable::dump_csv(std::ostream& os) const
{
    os << "q,xx,yy,zz,xz\n";
    os.precision(17);
    for (std::size_t i = 0; i < scaled_.size(); ++i) {
        double const q = std::exp(u_lo_ + static_cast<double>(i) * du_);
        double const env = std::exp(-2.0 * q * za_);
        auto const& s = scaled_[i];
        os << q << ',' << s.xx * env << ',' << s.yy * env << ',' << s.zz * env << ','
           << s.xz * env << '\n';
    }
}

Dyad g_im(double q, double za, double omega, MaterialParams const& m)
{
    return im_r_tm(m, omega) * geometric_dyad(q, za).value;
}

Dyad g_im(GeometricDyadTable const& table, double q, double omega, MaterialParams const& m)
{
    return im_r_tm(m, omega) * table(q);
}

Dyad g_full(double q, double za, double omega, MaterialParams const& m)
{
    return r_tm(m, omega) * geometric_dyad(q, za).value;
}

Dyad g_full(GeometricDyadTable const& table, double q, double omega, MaterialParams const& m)
{
    return r_tm(m, omega) * table(q);
}

}  // namespace qfric
