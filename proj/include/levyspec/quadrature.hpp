#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "levyspec/common.hpp"

namespace levyspec {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
// Nodes are symmetric; only the non-negative half is tabulated.
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss weights attach to nodes 1, 3, 5, 7 of the table above.
inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
QuadResult gk15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double fc = f(mid);
    double kron = kronrod_w[7] * fc;
    double gauss = gauss_w[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double dx = hw * gk_nodes[i];
        double fsum = f(mid - dx) + f(mid + dx);
        kron += kronrod_w[i] * fsum;
        if (i % 2 == 1) gauss += gauss_w[i / 2] * fsum;
    }
    QuadResult r;
    r.value = kron * hw;
    r.error = std::abs(kron - gauss) * std::abs(hw);
    r.converged = true;
    return r;
}

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b] to absolute
/// tolerance abs_tol. Splits the worst panel first.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                              int max_panels = 4000) {
    if (a == b) return {0.0, 0.0, true};
    std::priority_queue<detail::Panel> panels;
    auto first = detail::gk15(f, a, b);
    panels.push({a, b, first.value, first.error});
    double total_value = first.value;
    double total_error = first.error;
    int used = 1;
    while (total_error > abs_tol && used < max_panels) {
        detail::Panel worst = panels.top();
        panels.pop();
        total_value -= worst.value;
        total_error -= worst.error;
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval no longer splittable in floating point
            total_value += worst.value;
            total_error += worst.error;
            break;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        panels.push({worst.a, mid, left.value, left.error});
        panels.push({mid, worst.b, right.value, right.error});
        total_value += left.value + right.value;
        total_error += left.error + right.error;
        ++used;
    }
    QuadResult r;
    r.value = total_value;
    r.error = total_error;
    r.converged = total_error <= abs_tol;
    return r;
}

/// Integral over t in (-inf, t_hi] of a log-space integrand h(t) that
/// decays like exp(sigma*t) as t -> -inf, sigma > 0. Descends in blocks
/// until the extrapolated remainder is below tolerance or h underflows.
template <class H>
QuadResult integrate_logspace_origin(H&& h, double t_hi, double sigma,
                                     double abs_tol) {
    if (sigma <= 0.0)
        throw DivergentMeasure("near-origin integral diverges (exponent <= 0)");
    const double block = 8.0;
    QuadResult out;
    out.converged = false;
    double err_budget = 0.5 * abs_tol;
    for (int depth = 0; depth < 120; ++depth) {
        double t_lo = t_hi - block;
        auto q = integrate_adaptive(h, t_lo, t_hi, 0.25 * abs_tol / (depth + 1.0));
        out.value += q.value;
        out.error += q.error;
        double edge = std::abs(h(t_lo));
        double remainder = edge / sigma;
        if (!std::isfinite(q.value) || !std::isfinite(edge)) {
            out.converged = false;
            out.error = std::numeric_limits<double>::infinity();
            return out;
        }
        if (remainder < err_budget || edge == 0.0) {
            out.error += remainder;
            out.converged = out.error <= abs_tol * 4.0;
            return out;
        }
        if (t_lo < -700.0) break;  // exp underflow floor
        t_hi = t_lo;
    }
    out.converged = false;
    return out;
}

/// Integral of g over (0, b] where g(r) = O(r^{sigma-1}) as r -> 0 with
/// sigma > 0, via the log-space descent above.
template <class F>
QuadResult integrate_singular_origin(F&& g, double b, double sigma,
                                     double abs_tol) {
    auto h = [&g](double t) {
        double r = std::exp(t);
        return g(r) * r;
    };
    return integrate_logspace_origin(h, std::log(b), sigma, abs_tol);
}

/// Sum of panel integrals of f over [a, a + k*step) for k = 0, 1, ...
/// intended for oscillatory tails whose panel contributions alternate
/// and decay. Stops once two consecutive panel magnitudes fall below
/// the tolerance; the last panel magnitude bounds the remainder.
template <class F>
QuadResult integrate_decaying_panels(F&& f, double a, double step,
                                     double abs_tol, int max_panels = 200000) {
    QuadResult out;
    int small_run = 0;
    double lo = a;
    for (int k = 0; k < max_panels; ++k) {
        double hi = lo + step;
        auto q = integrate_adaptive(f, lo, hi, 0.05 * abs_tol, 64);
        out.value += q.value;
        out.error += q.error;
        double mag = std::abs(q.value);
        small_run = (mag < 0.25 * abs_tol) ? small_run + 1 : 0;
        if (small_run >= 2) {
            out.error += mag;
            out.converged = true;
            return out;
        }
        lo = hi;
    }
    out.converged = false;
    return out;
}

}  // namespace levyspec
