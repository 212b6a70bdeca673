#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "levyspec/common.hpp"
#include "levyspec/quadrature.hpp"

namespace levyspec {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Surface measure of the unit sphere boundary used in radial
/// reductions: 2 points in d=1, circumference 2*pi in d=2.
inline double sphere_surface(int d) { return d == 1 ? 2.0 : 2.0 * pi; }

/// Symmetric non-negative definite d x d matrix (d in {1, 2}).
struct DiffusionMatrix {
    int d = 1;
    std::array<std::array<double, 2>, 2> e{{{0.0, 0.0}, {0.0, 0.0}}};

    static DiffusionMatrix zero(int d) { return DiffusionMatrix{d, {}}; }
    static DiffusionMatrix identity(int d) { return scalar(d, 1.0); }
    static DiffusionMatrix scalar(int d, double c) {
        DiffusionMatrix a;
        a.d = d;
        a.e[0][0] = c;
        if (d == 2) a.e[1][1] = c;
        return a;
    }

    double quad_form(const Vec& u) const {
        if (d == 1) return e[0][0] * u[0] * u[0];
        return e[0][0] * u[0] * u[0] + 2.0 * e[0][1] * u[0] * u[1] +
               e[1][1] * u[1] * u[1];
    }

    bool is_zero() const {
        return e[0][0] == 0.0 && e[0][1] == 0.0 && e[1][0] == 0.0 &&
               e[1][1] == 0.0;
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m = std::max(m, std::abs(e[i][j]));
        return m;
    }

    // closed-form symmetric eigenvalues, ascending
    std::array<double, 2> eigenvalues() const {
        if (d == 1) return {e[0][0], e[0][0]};
        double mean = 0.5 * (e[0][0] + e[1][1]);
        double off = 0.5 * (e[0][0] - e[1][1]);
        double r = std::sqrt(off * off + e[0][1] * e[1][0]);
        return {mean - r, mean + r};
    }

    double min_eigenvalue() const { return eigenvalues()[0]; }
};

struct Atom {
    Vec y{0.0, 0.0};
    double w = 0.0;
};

/// Declared envelope of a radial density for r >= 1, used to truncate
/// tail integrals: rho(r) <= coeff * r^{-d-rate} (power law) or
/// rho(r) <= coeff * exp(-rate * r) (exponential), rate > 0.
struct TailDecay {
    enum class Kind { PowerLaw, Exponential };
    Kind kind = Kind::PowerLaw;
    double coeff = 0.0;
    double rate = 0.0;

    // upper bound on nu({|y| > R}) for R >= 1
    double mass_beyond(double R, int d) const {
        double S = sphere_surface(d);
        if (kind == Kind::PowerLaw)
            return S * coeff * std::pow(R, -rate) / rate;
        if (d == 1) return S * coeff * std::exp(-rate * R) / rate;
        return S * coeff * std::exp(-rate * R) * (R / rate + 1.0 / (rate * rate));
    }
};

struct ZeroMeasure {};

struct AtomMeasure {
    std::vector<Atom> atoms;
};

/// Isotropic stable density scale * |y|^{-d-alpha}, 0 < alpha < 2.
struct StableMeasure {
    double alpha = 1.0;
    double scale = 1.0;
};

/// User radial density rho(r) with declared singularity exponent s
/// (rho(r) = O(r^{-d-s}) as r -> 0, s < 2) and declared tail envelope.
struct RadialMeasure {
    std::function<double(double)> rho;
    double singularity_exponent = 0.0;
    TailDecay tail;
};

struct LevyMeasure {
    int d = 1;
    std::variant<ZeroMeasure, AtomMeasure, StableMeasure, RadialMeasure> v;

    static LevyMeasure zero(int d) { return {d, ZeroMeasure{}}; }
    static LevyMeasure atoms(int d, std::vector<Atom> a) {
        return {d, AtomMeasure{std::move(a)}};
    }
    static LevyMeasure stable(int d, double alpha, double scale) {
        return {d, StableMeasure{alpha, scale}};
    }
    static LevyMeasure radial(int d, std::function<double(double)> rho,
                              double s, TailDecay tail) {
        return {d, RadialMeasure{std::move(rho), s, tail}};
    }

    bool is_zero() const { return std::holds_alternative<ZeroMeasure>(v); }
    bool is_atoms() const { return std::holds_alternative<AtomMeasure>(v); }
    bool is_stable() const { return std::holds_alternative<StableMeasure>(v); }
    bool is_radial() const { return std::holds_alternative<RadialMeasure>(v); }

    const AtomMeasure& as_atoms() const { return std::get<AtomMeasure>(v); }
    const StableMeasure& as_stable() const { return std::get<StableMeasure>(v); }
    const RadialMeasure& as_radial() const { return std::get<RadialMeasure>(v); }
};

struct LevyTriplet {
    DiffusionMatrix a;
    LevyMeasure nu;
    int d = 1;

    static LevyTriplet make(DiffusionMatrix a, LevyMeasure nu) {
        int d = a.d;
        return LevyTriplet{std::move(a), std::move(nu), d};
    }
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(std::string why) {
        ok = false;
        violations.push_back(std::move(why));
    }
};

namespace detail {

// Unified radial view of the two density-backed measure variants.
// pure_power marks densities amp * r^{-d-s} exactly, which lets
// integrands fold exponents in log space and survive deep descents.
struct RadialView {
    int d = 1;
    double s = 0.0;
    TailDecay tail;
    std::function<double(double)> rho;
    bool pure_power = false;
    double amp = 0.0;
};

inline RadialView radial_view(const LevyMeasure& m) {
    RadialView v;
    v.d = m.d;
    if (m.is_stable()) {
        const auto& st = m.as_stable();
        v.s = st.alpha;
        v.amp = st.scale;
        v.pure_power = true;
        double p = -(m.d + st.alpha);
        double c = st.scale;
        v.rho = [p, c](double r) { return c * std::pow(r, p); };
        v.tail = TailDecay{TailDecay::Kind::PowerLaw, st.scale, st.alpha};
    } else {
        const auto& rd = m.as_radial();
        v.s = rd.singularity_exponent;
        v.rho = rd.rho;
        v.tail = rd.tail;
    }
    return v;
}

// Smallest R >= 1 with declared tail mass below tol, found by doubling.
inline double truncation_radius(const RadialView& v, double tol) {
    double R = 1.0;
    for (int i = 0; i < 1024; ++i) {
        if (v.tail.mass_beyond(R, v.d) < tol) return R;
        R *= 2.0;
        if (R > 1e300)
            throw QuadratureFailure("declared tail too heavy to truncate");
    }
    throw QuadratureFailure("declared tail too heavy to truncate");
}

// integral of rho * S * r^{d-1} over (R0, R1], smooth tail piece,
// integrated in log space
inline QuadResult shell_mass(const RadialView& v, double R0, double R1,
                             double abs_tol) {
    double S = sphere_surface(v.d);
    auto h = [&](double t) {
        double r = std::exp(t);
        return v.rho(r) * S * std::pow(r, v.d - 1) * r;
    };
    return integrate_adaptive(h, std::log(R0), std::log(R1), abs_tol);
}

// Integral of kern(r) * rho(r) * S * r^{d-1} over (0, b]. The kernel is
// supplied as the bounded ratio kern(r) / r^order so the pure-power
// branch can fold all exponents in log space and survive deep descents
// without overflow.
template <class KernRatio>
QuadResult near_origin_integral(const RadialView& v, double b,
                                KernRatio&& kern_ratio, double kern_order,
                                double abs_tol) {
    double S = sphere_surface(v.d);
    double sigma = kern_order - v.s;
    if (sigma <= 0.0)
        throw DivergentMeasure("near-origin integral diverges");
    if (v.pure_power) {
        double c = v.amp * S;
        auto h = [c, sigma, &kern_ratio](double t) {
            // kern(r) * amp*r^{-d-s} * S * r^{d-1} * r
            return c * kern_ratio(std::exp(t)) * std::exp(sigma * t);
        };
        return integrate_logspace_origin(h, std::log(b), sigma, abs_tol);
    }
    auto g = [&](double r) {
        return kern_ratio(r) * std::pow(r, kern_order) * v.rho(r) * S *
               std::pow(r, v.d - 1);
    };
    return integrate_singular_origin(g, b, sigma, abs_tol);
}

}  // namespace detail

/// Total mass nu(R^d); +infinity for measures that are not finite.
inline double total_mass(const LevyMeasure& m, double abs_tol = 1e-10) {
    if (m.is_zero()) return 0.0;
    if (m.is_atoms()) {
        double s = 0.0;
        for (const auto& a : m.as_atoms().atoms) s += a.w;
        return s;
    }
    if (m.is_stable()) return inf;  // non-integrable at the origin
    auto v = detail::radial_view(m);
    if (v.s >= 0.0) return inf;
    auto near = detail::near_origin_integral(
        v, 1.0, [](double) { return 1.0; }, 0.0, 0.5 * abs_tol);
    double R = detail::truncation_radius(v, 0.25 * abs_tol);
    auto tail = detail::shell_mass(v, 1.0, R, 0.25 * abs_tol);
    if (!near.converged || !tail.converged)
        throw QuadratureFailure("total_mass quadrature did not converge");
    return near.value + tail.value;
}

/// The Levy integrability functional: integral of (|y|^2 ^ 1) nu(dy).
inline double levy_integral(const LevyMeasure& m, double abs_tol = 1e-10) {
    if (m.is_zero()) return 0.0;
    if (m.is_atoms()) {
        double s = 0.0;
        for (const auto& a : m.as_atoms().atoms)
            s += a.w * std::min(norm_sq(a.y, m.d), 1.0);
        return s;
    }
    auto v = detail::radial_view(m);
    if (v.s >= 2.0)
        throw DivergentMeasure(
            "singularity exponent >= 2 violates the Levy condition");
    auto near = detail::near_origin_integral(
        v, 1.0, [](double) { return 1.0; }, 2.0, 0.5 * abs_tol);
    double R = detail::truncation_radius(v, 0.25 * abs_tol);
    auto tail = detail::shell_mass(v, 1.0, R, 0.25 * abs_tol);
    if (!near.converged || !tail.converged)
        throw QuadratureFailure("levy_integral quadrature did not converge");
    return near.value + tail.value;
}

/// Second moment of nu restricted to |y| <= delta (delta <= 1); used to
/// Taylor-replace the singular region in direct-space applications.
inline double second_moment_below(const LevyMeasure& m, double delta,
                                  double abs_tol = 1e-12) {
    if (m.is_zero()) return 0.0;
    if (m.is_atoms()) {
        double s = 0.0;
        for (const auto& a : m.as_atoms().atoms) {
            double r2 = norm_sq(a.y, m.d);
            if (r2 <= delta * delta) s += a.w * r2;
        }
        return s;
    }
    auto v = detail::radial_view(m);
    auto q = detail::near_origin_integral(
        v, delta, [](double) { return 1.0; }, 2.0, abs_tol);
    if (!q.converged)
        throw QuadratureFailure("second moment quadrature did not converge");
    return q.value;
}

/// Explicit opt-in symmetrization: each atom (y, w) is replaced by the
/// pair (y, w/2), (-y, w/2); exact duplicates are merged.
inline LevyMeasure symmetrize_atoms(int d, const std::vector<Atom>& atoms) {
    std::vector<Atom> out;
    out.reserve(2 * atoms.size());
    for (const auto& a : atoms) {
        if (a.y[0] == 0.0 && (d == 1 || a.y[1] == 0.0))
            throw OriginAtom("atom at the origin is not a Levy measure");
        out.push_back({a.y, 0.5 * a.w});
        out.push_back({negate(a.y), 0.5 * a.w});
    }
    std::sort(out.begin(), out.end(), [](const Atom& p, const Atom& q) {
        return std::tie(p.y[0], p.y[1]) < std::tie(q.y[0], q.y[1]);
    });
    std::vector<Atom> merged;
    for (const auto& a : out) {
        if (!merged.empty() && merged.back().y == a.y)
            merged.back().w += a.w;
        else
            merged.push_back(a);
    }
    return LevyMeasure::atoms(d, std::move(merged));
}

namespace detail {

inline bool atoms_symmetric(const std::vector<Atom>& atoms, int d) {
    for (const auto& a : atoms) {
        Vec mirror = negate(a.y);
        if (d == 1) mirror[1] = a.y[1];
        double w_at = 0.0, w_mirror = 0.0;
        for (const auto& b : atoms) {
            if (b.y == a.y) w_at += b.w;
            if (b.y == mirror) w_mirror += b.w;
        }
        if (w_at != w_mirror) return false;
    }
    return true;
}

}  // namespace detail

/// Checks every structural invariant of a triplet; never throws.
inline ValidationReport validate_triplet(const LevyTriplet& t) {
    ValidationReport rep;
    if (t.d != 1 && t.d != 2) {
        rep.fail("dimension must be 1 or 2");
        return rep;
    }
    if (t.a.d != t.d || t.nu.d != t.d)
        rep.fail("diffusion matrix / measure dimension mismatch");

    for (int i = 0; i < t.a.d; ++i)
        for (int j = 0; j < t.a.d; ++j)
            if (!std::isfinite(t.a.e[i][j]))
                rep.fail("diffusion matrix has non-finite entries");
    if (t.a.d == 2 && t.a.e[0][1] != t.a.e[1][0])
        rep.fail("diffusion matrix not symmetric");
    double tol_psd = 1e-12 * std::max(t.a.max_abs_entry(), 1e-300);
    if (t.a.min_eigenvalue() < -tol_psd)
        rep.fail("diffusion matrix not non-negative definite");

    if (t.nu.is_atoms()) {
        const auto& atoms = t.nu.as_atoms().atoms;
        double mass = 0.0;
        bool structural_ok = true;
        for (const auto& a : atoms) {
            if (!std::isfinite(a.y[0]) || !std::isfinite(a.y[1]) ||
                !std::isfinite(a.w)) {
                rep.fail("atom with non-finite data");
                structural_ok = false;
                break;
            }
            if (a.y[0] == 0.0 && (t.d == 1 || a.y[1] == 0.0)) {
                rep.fail("atom at the origin");
                structural_ok = false;
            }
            if (a.w <= 0.0) {
                rep.fail("atom with non-positive weight");
                structural_ok = false;
            }
            mass += a.w;
        }
        if (structural_ok && !detail::atoms_symmetric(atoms, t.d))
            rep.fail("measure not symmetric");
        if (!std::isfinite(mass)) rep.fail("atom mass not finite");
    } else if (t.nu.is_stable()) {
        const auto& st = t.nu.as_stable();
        if (!(st.alpha > 0.0 && st.alpha < 2.0))
            rep.fail("stable exponent must lie in (0, 2)");
        if (!(st.scale > 0.0)) rep.fail("stable scale must be positive");
    } else if (t.nu.is_radial()) {
        const auto& rd = t.nu.as_radial();
        if (!rd.rho) rep.fail("radial density missing");
        if (rd.singularity_exponent >= 2.0)
            rep.fail("singularity exponent >= 2 violates the Levy condition");
        if (!(rd.tail.coeff > 0.0) || !(rd.tail.rate > 0.0))
            rep.fail("radial density requires a declared tail envelope");
        if (rd.rho)
            for (double r : {0.5, 1.0, 2.0})
                if (rd.rho(r) < 0.0) {
                    rep.fail("radial density negative");
                    break;
                }
    }

    if (t.a.is_zero() && t.nu.is_zero())
        rep.fail("degenerate triplet: zero diffusion and zero measure");

    if (rep.ok && !t.nu.is_zero()) {
        try {
            levy_integral(t.nu, 1e-8);
        } catch (const Error& e) {
            rep.fail(std::string("Levy integrability check failed: ") + e.what());
        }
    }
    return rep;
}

/// Exact locations sorted and duplicate locations merged; the
/// canonical form the CLI applies before symmetry checking.
inline std::vector<Atom> canonicalize_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& p, const Atom& q) {
        return std::tie(p.y[0], p.y[1]) < std::tie(q.y[0], q.y[1]);
    });
    std::vector<Atom> merged;
    for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().y == a.y)
            merged.back().w += a.w;
        else
            merged.push_back(a);
    }
    return merged;
}

}  // namespace levyspec
