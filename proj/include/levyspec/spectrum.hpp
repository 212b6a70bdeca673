#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "levyspec/grid.hpp"
#include "levyspec/symbol.hpp"

namespace levyspec {

/// Classification of the generator spectrum: the closed half-line
/// (-inf, 0] when eta is unbounded, the interval [-K, 0] when
/// sup eta = K is finite, or inconclusive when neither is certified.
struct SpectrumReport {
    enum class Classification { HalfLine, Interval, Inconclusive };

    Classification classification = Classification::Inconclusive;
    double K_hat = 0.0;        // Interval: right endpoint is always 0
    double lower_bound = 0.0;  // Inconclusive: grid maximum of eta
    bool proposition_check = true;  // spectrum contained in (-inf, 0]

    struct Evidence {
        std::string rule;
        std::string sup_source;
        double box_halfwidth = 0.0;
        int grid_points = 0;
    } evidence;

    bool conclusive() const {
        return classification != Classification::Inconclusive;
    }
};

/// Applies the classification rules in order: uniformly elliptic
/// diffusion, certified unbounded growth of the closed form or the
/// triplet structure, then the finite-sup grid estimate.
inline SpectrumReport classify_spectrum(const Symbol& s,
                                        SupSearchSettings cfg = {}) {
    SpectrumReport rep;
    rep.evidence.box_halfwidth = cfg.box_halfwidth;

    const auto& triplet = s.source_triplet();
    if (triplet && triplet->a.min_eigenvalue() > 0.0) {
        rep.classification = SpectrumReport::Classification::HalfLine;
        rep.evidence.rule = "uniformly elliptic diffusion";
        rep.evidence.sup_source = "eta(u) >= b|u|^2 -> infinity";
        return rep;
    }
    if (s.known_unbounded()) {
        rep.classification = SpectrumReport::Classification::HalfLine;
        rep.evidence.rule = s.form() == Symbol::Form::Quadrature
                                ? "certified unbounded growth"
                                : "unbounded closed form";
        rep.evidence.sup_source = "sup eta = infinity";
        return rep;
    }

    auto sup = sup_symbol(s, cfg);
    rep.evidence.grid_points =
        cfg.points_per_axis > 0 ? cfg.points_per_axis
                                : (s.dim() == 1 ? 4096 : 512);
    if (sup.kind == SupInfo::Kind::Finite) {
        rep.classification = SpectrumReport::Classification::Interval;
        rep.K_hat = sup.value;
        rep.evidence.rule = "finite sup of eta";
        rep.evidence.sup_source = "grid search + golden-section refinement";
        rep.proposition_check = rep.K_hat >= -1e-12;
        return rep;
    }
    rep.classification = SpectrumReport::Classification::Inconclusive;
    rep.lower_bound = sup.value;
    rep.evidence.rule = "sup eta not certified";
    rep.evidence.sup_source = "grid maximum is a lower bound only";
    return rep;
}

/// Grid-sampled summary of Ran(eta). Continuity of eta makes the true
/// range an interval, so persistent gaps can only be under-sampling;
/// they are reported as evidence, never as proof.
struct RangeSummary {
    double min = 0.0;
    double max = 0.0;
    bool gaps_detected = false;
    double largest_gap = 0.0;
    double median_spacing = 0.0;
};

inline RangeSummary range_of_symbol(const Symbol& s,
                                    const std::vector<Vec>& u_grid) {
    if (u_grid.size() < 2) throw BadParameter("range scan needs a dense grid");
    std::vector<double> vals(u_grid.size());
    for (std::size_t i = 0; i < u_grid.size(); ++i) vals[i] = s(u_grid[i]);
    std::sort(vals.begin(), vals.end());
    RangeSummary out;
    out.min = vals.front();
    out.max = vals.back();
    std::vector<double> gaps(vals.size() - 1);
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
        gaps[i] = vals[i + 1] - vals[i];
    out.largest_gap = *std::max_element(gaps.begin(), gaps.end());
    std::vector<double> sorted_gaps = gaps;
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    out.median_spacing = sorted_gaps[sorted_gaps.size() / 2];
    double threshold = 100.0 * out.median_spacing;
    if (threshold > 0.0) out.gaps_detected = out.largest_gap > threshold;
    return out;
}

/// The discrete symbol of the node-aligned generator matrix: atom part
/// exact, diffusion replaced by the second-difference stencil symbol
/// (2/h^2) sum_i a_ii (1 - cos(h u_i)).
inline std::vector<double> discrete_multiplier(const LevyTriplet& t,
                                               const PeriodicGrid& g) {
    std::vector<double> out(g.size());
    double h = g.h();
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec u = g.frequency(i);
        double eta = 0.0;
        for (int ax = 0; ax < g.d; ++ax)
            eta += (2.0 / (h * h)) * t.a.e[ax][ax] *
                   detail::one_minus_cos(h * u[ax]);
        if (t.nu.is_atoms())
            eta += detail::atom_symbol_sum(t.nu.as_atoms().atoms, u, g.d);
        out[i] = eta;
    }
    return out;
}

struct EigenOracleReport {
    int n = 0;                   // points per axis
    std::size_t matrix_dim = 0;  // n^d
    double max_mismatch = 0.0;   // sorted eigenvalues vs sorted -eta_disc
};

namespace detail {

inline int atom_node_offset(double y, double h) {
    double ratio = y / h;
    double rounded = std::nearbyint(ratio);
    if (std::abs(ratio - rounded) > 1e-9)
        throw AtomOffGrid("atom not on a grid node");
    return static_cast<int>(rounded);
}

}  // namespace detail

/// Builds the dense discretized generator (circulant in d=1, block
/// circulant in d=2), takes all its eigenvalues by brute force, and
/// compares the sorted set against the sampled values of
/// -discrete_multiplier. On the torus the two agree to solver accuracy;
/// this is the desk-scale test of sigma(A) = Ran(-eta).
inline EigenOracleReport eigen_oracle(const LevyTriplet& t,
                                      const PeriodicGrid& g) {
    if (t.d != g.d) throw MismatchedModel("triplet / grid dimension mismatch");
    if ((g.d == 1 && g.n > 1024) || (g.d == 2 && g.n > 64))
        throw BadParameter("oracle grid too large for a dense eigensolve");
    if (t.a.d == 2 && t.a.e[0][1] != 0.0)
        throw BadParameter("oracle requires diagonal diffusion");
    if (!t.nu.is_atoms() && !t.nu.is_zero())
        throw BadParameter("oracle requires an atom (or zero) measure");
    auto rep = validate_triplet(t);
    if (!rep.ok)
        throw BadParameter("invalid triplet: " + rep.violations.front());

    const std::size_t N = g.size();
    const double h = g.h();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);

    auto wrap = [&](int i) { return ((i % g.n) + g.n) % g.n; };
    auto flat = [&](int i1, int i2) {
        return g.d == 1 ? static_cast<std::size_t>(i1)
                        : static_cast<std::size_t>(i1) * g.n + i2;
    };

    // jump part: sum_j w_j (S_{y_j} - I), the generator of the
    // compound Poisson semigroup (equal to half the symmetric second
    // difference for a symmetric atom list)
    if (t.nu.is_atoms()) {
        for (const auto& atom : t.nu.as_atoms().atoms) {
            int m1 = detail::atom_node_offset(atom.y[0], h);
            int m2 = g.d == 2 ? detail::atom_node_offset(atom.y[1], h) : 0;
            for (int i1 = 0; i1 < g.n; ++i1)
                for (int i2 = 0; i2 < (g.d == 2 ? g.n : 1); ++i2) {
                    std::size_t row = flat(i1, i2);
                    A(row, flat(wrap(i1 + m1), g.d == 2 ? wrap(i2 + m2) : 0)) +=
                        atom.w;
                    A(row, row) -= atom.w;
                }
        }
    }
    // diffusion: standard symmetric second differences per axis
    for (int ax = 0; ax < g.d; ++ax) {
        double c = t.a.e[ax][ax] / (h * h);
        if (c == 0.0) continue;
        for (int i1 = 0; i1 < g.n; ++i1)
            for (int i2 = 0; i2 < (g.d == 2 ? g.n : 1); ++i2) {
                std::size_t row = flat(i1, i2);
                for (int step : {+1, -1}) {
                    int j1 = ax == 0 ? wrap(i1 + step) : i1;
                    int j2 = ax == 1 ? wrap(i2 + step) : i2;
                    A(row, flat(j1, j2)) += c;
                }
                A(row, row) -= 2.0 * c;
            }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A,
                                                      Eigen::EigenvaluesOnly);
    std::vector<double> matrix_eigs(es.eigenvalues().data(),
                                    es.eigenvalues().data() + N);
    std::vector<double> symbol_eigs = discrete_multiplier(t, g);
    for (auto& v : symbol_eigs) v = -v;
    std::sort(matrix_eigs.begin(), matrix_eigs.end());
    std::sort(symbol_eigs.begin(), symbol_eigs.end());

    EigenOracleReport out;
    out.n = g.n;
    out.matrix_dim = N;
    for (std::size_t i = 0; i < N; ++i)
        out.max_mismatch =
            std::max(out.max_mismatch, std::abs(matrix_eigs[i] - symbol_eigs[i]));
    return out;
}

struct SharpnessReport {
    bool attains_2M = false;
    double two_M = 0.0;
    double eta_max = 0.0;
    Vec witness{0.0, 0.0};
};

/// Searches for a frequency u putting every atom at an odd multiple of
/// pi (u . y_j = (2n+1) pi), which makes eta(u) reach the Lemma bound
/// 2M. Dense scan plus local refinement; failure to find one reports
/// the maximum found instead.
inline SharpnessReport atom_sharpness_check(const LevyMeasure& nu,
                                            SupSearchSettings cfg = {}) {
    if (!nu.is_atoms()) throw BadParameter("sharpness check needs atoms");
    const auto& atoms = nu.as_atoms().atoms;
    SharpnessReport out;
    out.two_M = 2.0 * total_mass(nu);
    auto eta = [&](const Vec& u) {
        return detail::atom_symbol_sum(atoms, u, nu.d);
    };
    int pts = cfg.points_per_axis > 0 ? cfg.points_per_axis
                                      : (nu.d == 1 ? 65536 : 1024);
    auto [best, at] = detail::maximize_on_box(eta, nu.d, cfg.box_halfwidth, pts);
    out.eta_max = best;
    out.witness = at;
    out.attains_2M = best >= out.two_M - 1e-9;
    return out;
}

}  // namespace levyspec
