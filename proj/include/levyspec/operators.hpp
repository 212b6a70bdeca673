#pragma once

#include <atomic>
#include <cmath>
#include <random>
#include <vector>

#include "levyspec/grid.hpp"
#include "levyspec/spectrum.hpp"
#include "levyspec/symbol.hpp"

namespace levyspec {

/// A symbol sampled over a grid's frequency lattice. The multiplier is
/// computed once at construction (quadrature symbols pay their cost
/// n^d times here, not per application) together with the spectrum
/// classification the resolvent consults.
struct GeneratorSpec {
    Symbol symbol;
    PeriodicGrid grid;
    std::vector<double> multiplier;  // eta(y_k), clamped to >= 0
    SpectrumReport classification;
};

inline GeneratorSpec make_generator(const Symbol& s, const PeriodicGrid& g) {
    if (s.dim() != g.d)
        throw MismatchedModel("symbol / grid dimension mismatch");
    GeneratorSpec G{s, g, std::vector<double>(g.size()), classify_spectrum(s)};
    auto* out = G.multiplier.data();
    const Symbol& sym = G.symbol;
    std::atomic<bool> bad{false};
    parallel_for(g.size(), [&, out](std::size_t i) {
        Vec u = g.frequency(i);
        double eta;
        try {
            eta = sym(u);
        } catch (const Error&) {
            bad.store(true);
            out[i] = 0.0;
            return;
        }
        if (eta < 0.0) {
            if (eta < -sym.quad_tol(u)) bad.store(true);
            eta = 0.0;  // quadrature noise; keep the semigroup contractive
        }
        out[i] = eta;
    });
    if (bad.load())
        throw QuadratureFailure(
            "symbol evaluation failed while building the multiplier");
    // eta(0) = 0 exactly at the zero-frequency slot
    std::size_t zero_flat = g.d == 1
                                ? static_cast<std::size_t>(g.n / 2)
                                : static_cast<std::size_t>(g.n / 2) * g.n + g.n / 2;
    G.multiplier[zero_flat] = 0.0;
    return G;
}

namespace detail {

template <class Scale>
GridFunction apply_multiplier(const GeneratorSpec& G, const GridFunction& f,
                              Scale&& factor) {
    if (f.grid != G.grid)
        throw MismatchedModel("grid function does not match the generator grid");
    GridFunction F =
        f.space == Space::Frequency ? f : forward_transform(f);
    for (std::size_t i = 0; i < F.values.size(); ++i)
        F.values[i] *= factor(G.multiplier[i]);
    return inverse_transform(F);
}

}  // namespace detail

/// A f = -inverse_transform(eta . forward_transform(f)); real input
/// yields real output up to rounding because eta is even.
inline GridFunction apply_generator(const GeneratorSpec& G,
                                    const GridFunction& f) {
    return detail::apply_multiplier(G, f,
                                    [](double eta) { return -eta; });
}

/// T_t f = inverse_transform(exp(-t eta) . forward_transform(f));
/// contraction for every t >= 0 and the identity at t = 0.
inline GridFunction apply_semigroup(const GeneratorSpec& G, double t,
                                    const GridFunction& f) {
    if (t < 0.0) throw BadParameter("semigroup time must be >= 0");
    if (t == 0.0) return f;
    return detail::apply_multiplier(
        G, f, [t](double eta) { return std::exp(-t * eta); });
}

/// Distance from lambda to the classified spectrum interval.
inline double spectrum_distance(const SpectrumReport& rep, double lambda) {
    switch (rep.classification) {
        case SpectrumReport::Classification::HalfLine:
            return std::max(lambda, 0.0);
        case SpectrumReport::Classification::Interval:
            if (lambda > 0.0) return lambda;
            if (lambda < -rep.K_hat) return -rep.K_hat - lambda;
            return 0.0;
        case SpectrumReport::Classification::Inconclusive:
            // sup eta unknown: treat every lambda <= 0 as possibly spectral
            return std::max(lambda, 0.0);
    }
    return 0.0;
}

/// (lambda I - A)^{-1} g via the multiplier 1/(lambda + eta). Refused
/// when lambda is within the safety margin of the lattice values -eta
/// or of the continuum classification interval, which is exactly the
/// non-invertible regime of the spectral theorem.
inline GridFunction apply_resolvent(const GeneratorSpec& G, double lambda,
                                    const GridFunction& g,
                                    double margin_scale = 1e-6) {
    double margin = margin_scale * (1.0 + std::abs(lambda));
    for (double eta : G.multiplier)
        if (std::abs(lambda + eta) <= margin)
            throw SpectrumProximity(
                "lambda within margin of a lattice spectral value");
    if (spectrum_distance(G.classification, lambda) <= margin)
        throw SpectrumProximity(
            "lambda within margin of the classified spectrum");
    return detail::apply_multiplier(
        G, g, [lambda](double eta) { return 1.0 / (lambda + eta); });
}

/// Discrete surrogate of the H_eta membership diagnostic:
/// sqrt( sum (1 + eta(y_k)^2) |f_hat(y_k)|^2 (2 pi / L)^d ).
inline double sobolev_norm(const GeneratorSpec& G, const GridFunction& f) {
    GridFunction F = f.space == Space::Frequency ? f : forward_transform(f);
    double w = std::pow(2.0 * pi / G.grid.L, G.grid.d);
    double s = 0.0;
    for (std::size_t i = 0; i < F.values.size(); ++i) {
        double eta = G.multiplier[i];
        s += (1.0 + eta * eta) * std::norm(F.values[i]);
    }
    return std::sqrt(s * w);
}

/// Twice continuously differentiable test function handed to the
/// direct-space generator: value, Hessian, a radius beyond which it is
/// negligible, and a bound on |f| used to truncate tail integrals.
struct C2Function {
    std::function<double(const Vec&)> value;
    std::function<std::array<std::array<double, 2>, 2>(const Vec&)> hessian;
    double support_radius = inf;
    double bound = 1.0;
};

/// Direct-space generator at a point: the diffusion part from the
/// Hessian plus the jump part
///   (1/2) integral of (f(x+y) - 2 f(x) + f(x-y)) nu(dy),
/// equivalently integral of (f(x+y) - f(x)) nu(dy) for symmetric nu --
/// the normalization under which A e^{iux} = -eta(u) e^{iux} with eta
/// exactly the Levy-Khintchine symbol.
inline double direct_generator(const LevyTriplet& t, const C2Function& f,
                               const Vec& x, double abs_tol = 1e-9) {
    auto hess = f.hessian(x);
    double result = 0.0;
    for (int i = 0; i < t.d; ++i)
        for (int j = 0; j < t.d; ++j) result += t.a.e[i][j] * hess[i][j];

    if (t.nu.is_zero()) return result;
    if (t.nu.is_atoms()) {
        double fx = f.value(x);
        for (const auto& a : t.nu.as_atoms().atoms) {
            Vec xp{x[0] + a.y[0], x[1] + a.y[1]};
            Vec xm{x[0] - a.y[0], x[1] - a.y[1]};
            result += 0.5 * a.w * (f.value(xp) - 2.0 * fx + f.value(xm));
        }
        return result;
    }

    // density path: Taylor-replace the singular region, integrate the
    // shell, truncate by the declared tail
    auto v = detail::radial_view(t.nu);
    const double delta = 1e-3;
    double sigma2 = second_moment_below(t.nu, delta, 0.1 * abs_tol);
    double trace_h = hess[0][0] + (t.d == 2 ? hess[1][1] : 0.0);
    result += 0.5 * trace_h * sigma2 / t.d;

    if (!std::isfinite(f.support_radius))
        throw BadParameter(
            "direct generator on a density needs a finite support radius");
    double fx = f.value(x);
    double R_need = f.support_radius + norm(x, t.d) + 1.0;
    double R_tail = detail::truncation_radius(
        v, abs_tol / (8.0 * std::max(1.0, f.bound)));
    double R = std::max(R_need, R_tail);

    double S = sphere_surface(t.d);
    auto integrand = [&](double logr) {
        double r = std::exp(logr);
        double second_diff;
        if (t.d == 1) {
            second_diff = f.value(Vec{x[0] + r, 0.0}) - 2.0 * fx +
                          f.value(Vec{x[0] - r, 0.0});
        } else {
            // angular average over 64 directions (trapezoid on the circle)
            const int n_ang = 64;
            double acc = 0.0;
            for (int k = 0; k < n_ang; ++k) {
                double th = 2.0 * pi * k / n_ang;
                acc += f.value(Vec{x[0] + r * std::cos(th),
                                   x[1] + r * std::sin(th)});
            }
            second_diff = 2.0 * (acc / n_ang - fx);
        }
        return 0.5 * second_diff * v.rho(r) * S * std::pow(r, t.d - 1) * r;
    };
    auto q = integrate_adaptive(integrand, std::log(delta), std::log(R),
                                0.5 * abs_tol, 8000);
    if (!q.converged)
        throw QuadratureFailure("direct generator quadrature did not converge");
    return result + q.value;
}

struct JumpNormReport {
    double mass = 0.0;
    double sharp_bound = 0.0;  // 2M, from sup eta <= 2M
    double crude_bound = 0.0;  // 4M, from the Cauchy-Schwarz estimate
    double max_ratio = 0.0;
    int trials = 0;
    bool pass = false;
};

/// Randomized check that the bounded jump generator obeys
/// ||A f|| <= 2M ||f|| (and a fortiori the 4M Cauchy-Schwarz bound).
inline JumpNormReport bounded_jump_norm_check(const LevyTriplet& t, int trials,
                                              const PeriodicGrid& g,
                                              std::uint64_t seed = 1) {
    if (!t.a.is_zero())
        throw BadParameter("jump norm check requires zero diffusion");
    double M = total_mass(t.nu);
    if (!std::isfinite(M)) throw NotFinite("jump norm check requires finite mass");

    JumpNormReport rep;
    rep.mass = M;
    rep.sharp_bound = 2.0 * M;
    rep.crude_bound = 4.0 * M;
    rep.trials = trials;

    if (t.nu.is_zero()) {
        rep.pass = true;
        return rep;
    }
    auto G = make_generator(Symbol::from_triplet(t), g);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < trials; ++k) {
        GridFunction f = GridFunction::zeros(g);
        for (auto& vv : f.values)
            vv = 2.0 * (static_cast<double>(rng()) / 18446744073709551616.0) - 1.0;
        double nf = l2_norm(f);
        if (nf == 0.0) continue;
        rep.max_ratio = std::max(rep.max_ratio, l2_norm(apply_generator(G, f)) / nf);
    }
    rep.pass = rep.max_ratio <= rep.sharp_bound + 1e-9;
    return rep;
}

}  // namespace levyspec
