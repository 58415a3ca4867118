#pragma once

// Adaptive Gauss-Kronrod (10/21) integration with declared breakpoints.
//
// One integrator serves scalars and 3x3 dyads. For dyads the panel error is
// the Frobenius norm of the Kronrod-Gauss difference, so every entry shares
// the same subdivision and Hermitian integrands stay Hermitian to rounding.
// A semi-infinite upper end is handled by x = x0 + L t / (1 - t), t in [0, 1),
// which keeps algebraically decaying tails integrable with bounded Jacobian.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qfric/dyad.hpp"
#include "qfric/errors.hpp"

namespace qfric {

template <class V>
struct IntegrationResult
{
    V value;
    double err = 0.0;  // absolute error estimate, same norm as the panel test
    int panels = 0;
};

struct QuadOptions
{
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_panels = 20000;
    // Length scale L of the semi-infinite map.
    double tail_scale = 1.0;
};

inline double value_norm(double v) { return std::abs(v); }
inline double value_norm(Dyad const& v) { return frobenius(v); }
inline double value_norm(cplx v) { return std::abs(v); }

/// Several integrands sharing one panel subdivision.
template <class T, std::size_t N>
struct ValueArray
{
    std::array<T, N> v{};

    ValueArray operator+(ValueArray const& o) const
    {
        ValueArray r;
        for (std::size_t i = 0; i < N; ++i) r.v[i] = v[i] + o.v[i];
        return r;
    }
    ValueArray operator-(ValueArray const& o) const
    {
        ValueArray r;
        for (std::size_t i = 0; i < N; ++i) r.v[i] = v[i] - o.v[i];
        return r;
    }
    ValueArray operator*(double s) const
    {
        ValueArray r;
        for (std::size_t i = 0; i < N; ++i) r.v[i] = v[i] * s;
        return r;
    }
    T& operator[](std::size_t i) { return v[i]; }
    T const& operator[](std::size_t i) const { return v[i]; }
};

template <class T, std::size_t N>
double value_norm(ValueArray<T, N> const& a)
{
    double s = 0.0;
    for (auto const& x : a.v) s += value_norm(x);
    return s;
}

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the abscissae kXgk[1], kXgk[3], ..., kXgk[9].
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class V>
struct PanelEstimate
{
    V kronrod;
    double err;
};

// Integrand on a panel [lo, hi] of the (possibly mapped) variable.
template <class V, class G>
PanelEstimate<V> gk21(G const& g, double lo, double hi)
{
    double const center = 0.5 * (lo + hi);
    double const half = 0.5 * (hi - lo);
    V const fc = g(center);
    V resk = fc * kWgk[10];
    V resg = fc * 0.0;
    for (int j = 0; j < 10; ++j) {
        double const dx = half * kXgk[j];
        V const f1 = g(center - dx);
        V const f2 = g(center + dx);
        V const s = f1 + f2;
        resk = V(resk + s * kWgk[j]);
        if (j % 2 == 1) {
            resg = V(resg + s * kWg[j / 2]);
        }
    }
    resk = V(resk * half);
    resg = V(resg * half);
    return {resk, value_norm(V(resk - resg))};
}

}  // namespace detail

/// Single GK21 pass on [a, b]: value and |K21 - G10|.
template <class V, class F>
detail::PanelEstimate<V> gauss_kronrod21(F const& f, double a, double b)
{
    return detail::gk21<V>(f, a, b);
}

/// Adaptive integration of f over [a, b] (b may be +infinity).
/// Breakpoints outside (a, b) are ignored. Throws ConvergenceError when the
/// panel budget runs out before the tolerance is met.
template <class V, class F>
IntegrationResult<V> integrate(F const& f, double a, double b,
                               std::span<double const> breakpoints,
                               QuadOptions const& opts = {})
{
    if (!(b > a)) {
        if (a == b) {
            V z = f(a) * 0.0;
            return {z, 0.0, 0};
        }
        throw DomainError("integrate: upper limit below lower limit");
    }
    bool const infinite = std::isinf(b);
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : breakpoints) {
        if (p > a && p < b && std::isfinite(p)) {
            pts.push_back(p);
        }
    }
    std::sort(pts.begin() + 1, pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (!infinite) {
        pts.push_back(b);
    }

    double const last_finite = pts.back();
    double const scale = opts.tail_scale;
    auto mapped = [&](double t) -> V {
        double const om = 1.0 - t;
        double const x = last_finite + scale * t / om;
        if (!(om > 0.0) || !std::isfinite(x)) {
            return V(f(last_finite) * 0.0);
        }
        V const fx = f(x);
        if (value_norm(fx) == 0.0) {
            return fx;
        }
        return V(fx * (scale / (om * om)));
    };
    auto plain = [&](double x) -> V { return V(f(x)); };

    struct Panel
    {
        double lo, hi;
        bool tail;
        V value;
        double err;
        bool operator<(Panel const& o) const { return err < o.err; }
    };
    std::priority_queue<Panel> heap;
    auto eval = [&](double lo, double hi, bool tail) {
        auto est = tail ? detail::gk21<V>(mapped, lo, hi)
                        : detail::gk21<V>(plain, lo, hi);
        return Panel{lo, hi, tail, est.kronrod, est.err};
    };

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        heap.push(eval(pts[i], pts[i + 1], false));
    }
    if (infinite) {
        heap.push(eval(0.0, 1.0, true));
    }

    // Panels too narrow to split further are retired with their estimate.
    std::vector<Panel> retired;
    int panels = static_cast<int>(heap.size());
    auto totals = [&]() {
        V sum = heap.empty() ? V(retired.front().value * 0.0)
                             : V(heap.top().value * 0.0);
        double err = 0.0;
        double mag = 0.0;
        auto h = heap;
        while (!h.empty()) {
            sum = V(sum + h.top().value);
            err += h.top().err;
            mag += value_norm(h.top().value);
            h.pop();
        }
        for (auto const& p : retired) {
            sum = V(sum + p.value);
            err += p.err;
            mag += value_norm(p.value);
        }
        return std::tuple<V, double, double>(sum, err, mag);
    };
    // Cancellation between panels limits the attainable absolute accuracy.
    auto goal = [&](V const& sum, double mag) {
        return std::max({opts.abs_tol, opts.rel_tol * value_norm(sum),
                         64.0 * std::numeric_limits<double>::epsilon() * mag});
    };

    // Running sums are refreshed from scratch periodically to avoid drift.
    V total = heap.top().value * 0.0;
    double total_err = 0.0;
    double magnitude = 0.0;
    std::tie(total, total_err, magnitude) = totals();
    int since_refresh = 0;
    double retired_err = 0.0;
    while (!heap.empty()) {
        double const target = goal(total, magnitude);
        if (total_err - retired_err <= target) {
            break;
        }
        if (panels >= opts.max_panels) {
            throw ConvergenceError(
                "integrate: panel budget exhausted (err " + std::to_string(total_err)
                    + " > target " + std::to_string(target) + ")",
                value_norm(total), total_err);
        }
        Panel worst = heap.top();
        heap.pop();
        double const mid = 0.5 * (worst.lo + worst.hi);
        double const width = worst.hi - worst.lo;
        double const tiny = 64.0 * std::numeric_limits<double>::epsilon()
                            * std::max(std::abs(mid), 1e-300);
        if (width <= tiny || !(mid > worst.lo && mid < worst.hi)) {
            retired.push_back(worst);
            retired_err += worst.err;
            if (heap.empty()) {
                break;
            }
            continue;
        }
        Panel left = eval(worst.lo, mid, worst.tail);
        Panel right = eval(mid, worst.hi, worst.tail);
        total = V(total - worst.value + left.value + right.value);
        total_err += left.err + right.err - worst.err;
        magnitude += value_norm(left.value) + value_norm(right.value) - value_norm(worst.value);
        heap.push(left);
        heap.push(right);
        ++panels;
        if (++since_refresh == 200) {
            std::tie(total, total_err, magnitude) = totals();
            since_refresh = 0;
        }
    }
    std::tie(total, total_err, magnitude) = totals();
    double const target = goal(total, magnitude);
    // Roundoff-limited panels keep their error in the report but do not
    // block termination.
    if (total_err - retired_err > 1.01 * target) {
        throw ConvergenceError("integrate: failed to converge",
                               value_norm(total), total_err);
    }
    return {total, total_err, panels};
}

template <class V, class F>
IntegrationResult<V> integrate(F const& f, double a, double b,
                               QuadOptions const& opts = {})
{
    return integrate<V>(f, a, b, std::span<double const>{}, opts);
}

}  // namespace qfric
