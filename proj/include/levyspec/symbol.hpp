#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levyspec/bernstein.hpp"
#include "levyspec/measures.hpp"
#include "levyspec/quadrature.hpp"

namespace levyspec {

namespace detail {

// 1 - cos(x) without cancellation
inline double one_minus_cos(double x) {
    double s = std::sin(0.5 * x);
    return 2.0 * s * s;
}

inline double one_minus_j0(double x) {
    double ax = std::abs(x);
    if (ax < 0.1) {
        double x2 = x * x;
        return x2 * (0.25 - x2 * (1.0 / 64.0 - x2 / 2304.0));
    }
    return 1.0 - std::cyl_bessel_j(0.0, ax);
}

// Angular average of 1 - cos(u.y) over the sphere |y| = r reduces the
// jump integral to one radial dimension: kernel 1 - cos(x) in d=1 and
// 1 - J0(x) in d=2, evaluated at x = |u| r.
inline double jump_kernel(int d, double x) {
    return d == 1 ? one_minus_cos(x) : one_minus_j0(x);
}

// jump_kernel(x) / x^2, bounded near x = 0
inline double jump_kernel_ratio(int d, double x) {
    double ax = std::abs(x);
    if (d == 1) {
        if (ax < 1e-8) return 0.5 - x * x / 24.0;
        double s = std::sin(0.5 * x) / x;
        return 2.0 * s * s;
    }
    if (ax < 0.1) {
        double x2 = x * x;
        return 0.25 - x2 * (1.0 / 64.0 - x2 / 2304.0);
    }
    return one_minus_j0(x) / (x * x);
}

inline double osc_kernel(int d, double x) {
    return d == 1 ? std::cos(x) : std::cyl_bessel_j(0.0, std::abs(x));
}

inline double atom_symbol_sum(const std::vector<Atom>& atoms, const Vec& u,
                              int d) {
    double s = 0.0;
    for (const auto& a : atoms) s += a.w * one_minus_cos(dot(u, a.y, d));
    return s;
}

// Oscillatory tail integral of osc_kernel(|u| r) rho(r) S r^{d-1} over
// [1, inf). Panels span half oscillation periods; partial sums are
// accelerated by iterated averaging (the terms alternate once the
// envelope decays).
inline QuadResult oscillating_tail(const RadialView& v, double umag,
                                   double abs_tol, int max_panels) {
    double S = sphere_surface(v.d);
    auto f = [&](double r) {
        return osc_kernel(v.d, umag * r) * v.rho(r) * S *
               std::pow(r, v.d - 1);
    };
    const double step = pi / umag;
    std::vector<double> partial;
    partial.reserve(64);
    double sum = 0.0;
    double quad_err = 0.0;
    double prev_apex = 0.0;
    bool have_prev = false;
    int agreements = 0, small_terms = 0;
    double lo = 1.0;
    QuadResult out;
    for (int k = 0; k < max_panels; ++k) {
        auto q = integrate_adaptive(f, lo, lo + step, abs_tol / 64.0, 64);
        lo += step;
        sum += q.value;
        quad_err += q.error;
        partial.push_back(sum);

        small_terms = (std::abs(q.value) < 0.25 * abs_tol) ? small_terms + 1 : 0;
        if (small_terms >= 2) {
            out.value = sum;
            out.error = quad_err + std::abs(q.value);
            out.converged = true;
            return out;
        }
        if (partial.size() >= 8) {
            std::size_t w = std::min<std::size_t>(partial.size(), 24);
            std::vector<double> row(partial.end() - w, partial.end());
            while (row.size() > 1) {
                for (std::size_t i = 0; i + 1 < row.size(); ++i)
                    row[i] = 0.5 * (row[i] + row[i + 1]);
                row.pop_back();
            }
            double apex = row[0];
            if (have_prev) {
                agreements = (std::abs(apex - prev_apex) < 0.25 * abs_tol)
                                 ? agreements + 1
                                 : 0;
                if (agreements >= 2) {
                    out.value = apex;
                    out.error = quad_err + 2.0 * std::abs(apex - prev_apex) +
                                0.25 * abs_tol;
                    out.converged = true;
                    return out;
                }
            }
            prev_apex = apex;
            have_prev = true;
        }
    }
    out.value = sum;
    out.converged = false;
    return out;
}

// Full jump integral of jump_kernel(|u| r) against a density measure.
inline QuadResult density_jump_integral(const RadialView& v, double umag,
                                        double abs_tol, int max_panels) {
    QuadResult out;
    if (umag == 0.0) {
        out.converged = true;
        return out;
    }
    double u2 = umag * umag;
    auto ratio = [&](double r) { return u2 * jump_kernel_ratio(v.d, umag * r); };
    auto near = near_origin_integral(v, 1.0, ratio, 2.0, 0.25 * abs_tol);
    out.value = near.value;
    out.error = near.error;
    out.converged = near.converged;

    double R = truncation_radius(v, abs_tol / 8.0);
    if (umag * R <= pi) {
        // tail spans less than half an oscillation: integrate directly
        double S = sphere_surface(v.d);
        auto h = [&](double t) {
            double r = std::exp(t);
            return jump_kernel(v.d, umag * r) * v.rho(r) * S *
                   std::pow(r, v.d - 1) * r;
        };
        auto q = integrate_adaptive(h, 0.0, std::log(R), 0.25 * abs_tol);
        out.value += q.value;
        out.error += q.error + 2.0 * abs_tol / 8.0;
        out.converged = out.converged && q.converged;
        return out;
    }
    auto mass = shell_mass(v, 1.0, R, abs_tol / 8.0);
    auto osc = oscillating_tail(v, umag, 0.25 * abs_tol, max_panels);
    out.value += mass.value - osc.value;
    out.error += mass.error + osc.error + abs_tol / 8.0;
    out.converged = out.converged && mass.converged && osc.converged;
    return out;
}

}  // namespace detail

struct QuadratureSettings {
    double tol_scale = 1e-8;  // absolute tolerance tol_scale * (1 + |u|^2)
    int max_panels = 200000;
};

struct SupInfo {
    enum class Kind { Finite, Infinite, Unknown };
    Kind kind = Kind::Unknown;
    double bound = 0.0;  // a-priori bound (2M) when Finite
};

/// The characteristic exponent eta(u) = a u.u + integral of
/// (1 - cos(u.y)) nu(dy), evaluable in closed form for the preset
/// families and by adaptive quadrature for general triplets.
class Symbol {
  public:
    enum class Form {
        Laplacian,
        Fractional,
        Relativistic,
        CompoundPoisson,
        Bernstein,
        Quadrature
    };

    static Symbol laplacian(int d) { return Symbol(Form::Laplacian, d); }

    static Symbol fractional(int d, double alpha) {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw BadParameter("fractional exponent must lie in (0, 2)");
        Symbol s(Form::Fractional, d);
        s.alpha_ = alpha;
        return s;
    }

    static Symbol relativistic(int d, double b) {
        if (!(b > 0.0)) throw BadParameter("relativistic parameter must be > 0");
        Symbol s(Form::Relativistic, d);
        s.b_ = b;
        return s;
    }

    static Symbol compound_poisson(int d, std::vector<Atom> atoms) {
        Symbol s(Form::CompoundPoisson, d);
        double mass = 0.0;
        for (const auto& a : atoms) mass += a.w;
        s.atoms_ = std::move(atoms);
        s.sup_ = {SupInfo::Kind::Finite, 2.0 * mass};
        return s;
    }

    static Symbol bernstein(int d, BernsteinFunction f) {
        Symbol s(Form::Bernstein, d);
        s.sup_.kind = f.known_unbounded() ? SupInfo::Kind::Infinite
                                          : SupInfo::Kind::Unknown;
        s.bf_ = std::move(f);
        return s;
    }

    static Symbol from_triplet(LevyTriplet t, QuadratureSettings qs = {}) {
        Symbol s(Form::Quadrature, t.d);
        s.qs_ = qs;
        if (!t.a.is_zero()) {
            s.sup_.kind = SupInfo::Kind::Infinite;
        } else if (t.nu.is_atoms() || t.nu.is_zero()) {
            s.sup_ = {SupInfo::Kind::Finite, 2.0 * total_mass(t.nu)};
        } else if (t.nu.is_stable()) {
            s.sup_.kind = SupInfo::Kind::Infinite;  // homogeneous growth
        } else {
            double M = total_mass(t.nu);
            if (std::isfinite(M))
                s.sup_ = {SupInfo::Kind::Finite, 2.0 * M};
            else
                s.sup_.kind = SupInfo::Kind::Unknown;
        }
        s.triplet_ = std::move(t);
        return s;
    }

    double operator()(const Vec& u) const {
        switch (form_) {
            case Form::Laplacian:
                return norm_sq(u, d_);
            case Form::Fractional:
                return std::pow(norm_sq(u, d_), 0.5 * alpha_);
            case Form::Relativistic: {
                double s = norm_sq(u, d_);
                return s / (std::sqrt(b_ * b_ + s) + b_);
            }
            case Form::CompoundPoisson:
                return detail::atom_symbol_sum(atoms_, u, d_);
            case Form::Bernstein:
                return (*bf_)(norm_sq(u, d_));
            case Form::Quadrature: {
                const LevyTriplet& t = *triplet_;
                double val = t.a.quad_form(u);
                if (t.nu.is_atoms()) {
                    val += detail::atom_symbol_sum(t.nu.as_atoms().atoms, u, d_);
                } else if (!t.nu.is_zero()) {
                    auto view = detail::radial_view(t.nu);
                    auto q = detail::density_jump_integral(
                        view, norm(u, d_), quad_tol(u), qs_.max_panels);
                    if (!q.converged)
                        throw QuadratureFailure(
                            "symbol quadrature exhausted its budget");
                    val += q.value;
                }
                return val;
            }
        }
        return 0.0;
    }

    int dim() const { return d_; }
    Form form() const { return form_; }
    double alpha() const { return alpha_; }
    double relativistic_b() const { return b_; }
    const std::optional<BernsteinFunction>& bernstein_function() const {
        return bf_;
    }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<LevyTriplet>& source_triplet() const { return triplet_; }
    const SupInfo& sup_info() const { return sup_; }
    double quad_tol(const Vec& u) const {
        return qs_.tol_scale * (1.0 + norm_sq(u, d_));
    }

    /// Unbounded growth certified by the closed form or the triplet
    /// structure (nonzero diffusion, stable measure).
    bool known_unbounded() const { return sup_.kind == SupInfo::Kind::Infinite; }

    std::string describe() const {
        switch (form_) {
            case Form::Laplacian: return "laplacian";
            case Form::Fractional:
                return "fractional(alpha=" + std::to_string(alpha_) + ")";
            case Form::Relativistic:
                return "relativistic(b=" + std::to_string(b_) + ")";
            case Form::CompoundPoisson: return "compound_poisson";
            case Form::Bernstein: return "bernstein";
            case Form::Quadrature: return "quadrature";
        }
        return "";
    }

  private:
    Symbol(Form f, int d) : form_(f), d_(d) {
        if (d != 1 && d != 2) throw BadParameter("dimension must be 1 or 2");
        if (f == Form::Laplacian || f == Form::Fractional ||
            f == Form::Relativistic)
            sup_.kind = SupInfo::Kind::Infinite;
    }

    Form form_;
    int d_;
    double alpha_ = 0.0;
    double b_ = 0.0;
    std::vector<Atom> atoms_;
    std::optional<BernsteinFunction> bf_;
    std::optional<LevyTriplet> triplet_;
    QuadratureSettings qs_;
    SupInfo sup_;
};

inline double eval_symbol(const Symbol& s, const Vec& u) { return s(u); }

/// Symbol of a validated triplet: exact atom sums plus split adaptive
/// quadrature for density measures.
inline Symbol quadrature_symbol(const LevyTriplet& t,
                                QuadratureSettings qs = {}) {
    auto rep = validate_triplet(t);
    if (!rep.ok)
        throw BadParameter("invalid triplet: " + rep.violations.front());
    return Symbol::from_triplet(t, qs);
}

namespace detail {

template <class F>
double golden_max(F&& f, double lo, double hi, int iters = 160) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && b - a > 1e-14 * (1.0 + std::abs(a)); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// dense grid scan over the centered box followed by local refinement
template <class F>
std::pair<double, Vec> maximize_on_box(F&& f, int d, double half, int pts) {
    double best = -inf;
    Vec at{0.0, 0.0};
    if (d == 1) {
        for (int i = 0; i <= pts; ++i) {
            double u = -half + 2.0 * half * i / pts;
            double v = f(Vec{u, 0.0});
            if (v > best) {
                best = v;
                at = {u, 0.0};
            }
        }
        double spacing = 2.0 * half / pts;
        auto f1 = [&](double u) { return f(Vec{u, 0.0}); };
        double u_star = golden_max(f1, at[0] - spacing, at[0] + spacing);
        double v = f1(u_star);
        if (v > best) {
            best = v;
            at = {u_star, 0.0};
        }
        return {best, at};
    }
    for (int i = 0; i <= pts; ++i)
        for (int j = 0; j <= pts; ++j) {
            Vec u{-half + 2.0 * half * i / pts, -half + 2.0 * half * j / pts};
            double v = f(u);
            if (v > best) {
                best = v;
                at = u;
            }
        }
    double spacing = 2.0 * half / pts;
    Vec cur = at;
    for (int sweep = 0; sweep < 6; ++sweep)
        for (int axis = 0; axis < 2; ++axis) {
            auto f1 = [&](double x) {
                Vec u = cur;
                u[axis] = x;
                return f(u);
            };
            cur[axis] = golden_max(f1, cur[axis] - spacing, cur[axis] + spacing);
        }
    double v = f(cur);
    if (v > best) {
        best = v;
        at = cur;
    }
    return {best, at};
}

}  // namespace detail

struct SupSearchSettings {
    double box_halfwidth = 8.0 * pi;
    int points_per_axis = 0;  // 0 selects 4096 (d=1) or 512 (d=2)
};

struct SupEstimate {
    SupInfo::Kind kind = SupInfo::Kind::Unknown;
    double value = 0.0;  // K-hat when Finite, grid lower bound when Unknown
    Vec witness{0.0, 0.0};
};

/// Estimates sup eta: Infinite when growth is certified, otherwise a
/// dense grid maximum refined by golden-section search. For bounded
/// symbols (zero diffusion, finite mass) the result is a genuine K-hat
/// with K-hat <= 2M; otherwise it is only a lower bound.
inline SupEstimate sup_symbol(const Symbol& s, SupSearchSettings cfg = {}) {
    SupEstimate out;
    if (s.known_unbounded()) {
        out.kind = SupInfo::Kind::Infinite;
        return out;
    }
    int pts = cfg.points_per_axis > 0 ? cfg.points_per_axis
                                      : (s.dim() == 1 ? 4096 : 512);
    auto [best, at] =
        detail::maximize_on_box([&](const Vec& u) { return s(u); }, s.dim(),
                                cfg.box_halfwidth, pts);
    out.value = best;
    out.witness = at;
    out.kind = s.sup_info().kind == SupInfo::Kind::Finite
                   ? SupInfo::Kind::Finite
                   : SupInfo::Kind::Unknown;
    return out;
}

/// PSD test of the matrix eta(u_i) + eta(u_j) - eta(u_i - u_j), the
/// pointwise characterization of negative definite functions vanishing
/// at zero. At most 64 points.
template <class F>
bool negative_definiteness_check(F&& eta, const std::vector<Vec>& pts, int d) {
    if (pts.size() > 64) throw BadParameter("at most 64 test points");
    const int n = static_cast<int>(pts.size());
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec diff{pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]};
            B(i, j) = eta(pts[i]) + eta(pts[j]) - eta(diff);
        }
    B = 0.5 * (B + B.transpose().eval());
    double scale = B.cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-9 * std::max(scale, 1e-300);
}

inline bool negative_definiteness_check(const Symbol& s,
                                        const std::vector<Vec>& pts) {
    return negative_definiteness_check([&](const Vec& u) { return s(u); }, pts,
                                       s.dim());
}

}  // namespace levyspec
