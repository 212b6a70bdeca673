#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "levyspec/operators.hpp"

namespace levyspec {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// One deterministic random stream. Distribution transforms are spelled
// out (no std::*_distribution) so identical seeds give identical
// samples on every platform.
struct RngStream {
    std::mt19937_64 eng;
    bool has_spare = false;
    double spare = 0.0;

    explicit RngStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s), b = splitmix64(s);
        std::seed_seq seq{static_cast<std::uint32_t>(a),
                          static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b),
                          static_cast<std::uint32_t>(b >> 32)};
        eng.seed(seq);
    }

    // uniform on (0, 1), never exactly 0 or 1
    double uniform() {
        return (static_cast<double>(eng() >> 11) + 0.5) *
               (1.0 / 9007199254740992.0);
    }

    double exponential() { return -std::log(uniform()); }

    double normal() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * pi * u2;
        spare = r * std::sin(th);
        has_spare = true;
        return r * std::cos(th);
    }

    // Knuth's product method; fine at desk-scale means
    unsigned poisson(double mean) {
        double limit = std::exp(-mean);
        unsigned k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }
};

// standard symmetric stable via Chambers-Mallows-Stuck:
// E exp(iuX) = exp(-|u|^alpha)
inline double stable_symmetric_std(RngStream& rng, double alpha) {
    double V = pi * (rng.uniform() - 0.5);
    if (alpha == 1.0) return std::tan(V);
    double W = rng.exponential();
    double s = std::sin(alpha * V) / std::pow(std::cos(V), 1.0 / alpha);
    double c = std::cos(V - alpha * V) / W;
    return s * std::pow(c, (1.0 - alpha) / alpha);
}

// one-sided stable subordinator value with E exp(-lambda T) =
// exp(-lambda^ap), 0 < ap < 1 (CMS with beta = 1, rescaled)
inline double stable_subordinator_std(RngStream& rng, double ap) {
    double V = pi * (rng.uniform() - 0.5);
    double W = rng.exponential();
    double B = 0.5 * pi;  // maximal skew
    double s = std::sin(ap * (V + B)) / std::pow(std::cos(V), 1.0 / ap);
    double c = std::cos(V - ap * (V + B)) / W;
    double x = s * std::pow(c, (1.0 - ap) / ap);
    return std::pow(std::cos(0.5 * pi * ap), 1.0 / ap) * x;
}

}  // namespace detail

/// Which process to sample and with what law parameters. The symbol of
/// each variant is available through sampler_exponent, the single
/// source of truth the statistical checks compare against.
struct SamplerSpec {
    enum class Variant {
        Brownian,         // X_t ~ N(0, 2 a t): eta(u) = a u . u
        CompoundPoisson,  // intensity M, jump law nu / M
        StableSymmetric,  // eta(u) = scale |u|^alpha
        SubordinatedBM    // eta(u) = |u|^{2p}, Bernstein power p
    };

    Variant variant = Variant::Brownian;
    int d = 1;
    DiffusionMatrix a;
    std::vector<Atom> atoms;
    double alpha = 1.0;   // stable index
    double scale = 1.0;   // stable amplitude
    double power = 0.5;   // subordination exponent p in (0, 1]
    double t = 1.0;
    std::size_t N = 0;
    std::uint64_t seed = 0;

    static SamplerSpec brownian(DiffusionMatrix a, double t, std::size_t N,
                                std::uint64_t seed) {
        SamplerSpec s;
        s.variant = Variant::Brownian;
        s.d = a.d;
        s.a = a;
        s.t = t;
        s.N = N;
        s.seed = seed;
        return s;
    }
    static SamplerSpec compound_poisson(int d, std::vector<Atom> atoms,
                                        double t, std::size_t N,
                                        std::uint64_t seed) {
        SamplerSpec s;
        s.variant = Variant::CompoundPoisson;
        s.d = d;
        s.atoms = std::move(atoms);
        s.t = t;
        s.N = N;
        s.seed = seed;
        return s;
    }
    static SamplerSpec stable(int d, double alpha, double scale, double t,
                              std::size_t N, std::uint64_t seed) {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw BadParameter("stable index must lie in (0, 2)");
        SamplerSpec s;
        s.variant = Variant::StableSymmetric;
        s.d = d;
        s.alpha = alpha;
        s.scale = scale;
        s.t = t;
        s.N = N;
        s.seed = seed;
        return s;
    }
    static SamplerSpec subordinated_bm(int d, double power, double t,
                                       std::size_t N, std::uint64_t seed) {
        if (!(power > 0.0 && power <= 1.0))
            throw BadParameter("subordination exponent must lie in (0, 1]");
        SamplerSpec s;
        s.variant = Variant::SubordinatedBM;
        s.d = d;
        s.power = power;
        s.t = t;
        s.N = N;
        s.seed = seed;
        return s;
    }
};

/// The characteristic exponent of the sampled law.
inline double sampler_exponent(const SamplerSpec& s, const Vec& u) {
    switch (s.variant) {
        case SamplerSpec::Variant::Brownian:
            return s.a.quad_form(u);
        case SamplerSpec::Variant::CompoundPoisson:
            return detail::atom_symbol_sum(s.atoms, u, s.d);
        case SamplerSpec::Variant::StableSymmetric:
            return s.scale * std::pow(norm_sq(u, s.d), 0.5 * s.alpha);
        case SamplerSpec::Variant::SubordinatedBM:
            return std::pow(norm_sq(u, s.d), s.power);
    }
    return 0.0;
}

namespace detail {

inline Vec draw_one(const SamplerSpec& s, RngStream& rng,
                    const std::array<double, 3>& chol,
                    const std::vector<double>& cum_weights, double mass) {
    switch (s.variant) {
        case SamplerSpec::Variant::Brownian: {
            double z0 = rng.normal();
            if (s.d == 1) return {chol[0] * z0, 0.0};
            double z1 = rng.normal();
            return {chol[0] * z0, chol[1] * z0 + chol[2] * z1};
        }
        case SamplerSpec::Variant::CompoundPoisson: {
            unsigned jumps = rng.poisson(mass * s.t);
            Vec x{0.0, 0.0};
            for (unsigned j = 0; j < jumps; ++j) {
                double pick = rng.uniform() * mass;
                std::size_t idx =
                    std::upper_bound(cum_weights.begin(), cum_weights.end(),
                                     pick) -
                    cum_weights.begin();
                if (idx >= s.atoms.size()) idx = s.atoms.size() - 1;
                x[0] += s.atoms[idx].y[0];
                x[1] += s.atoms[idx].y[1];
            }
            return x;
        }
        case SamplerSpec::Variant::StableSymmetric: {
            if (s.d == 1) {
                double c = std::pow(s.scale * s.t, 1.0 / s.alpha);
                return {c * stable_symmetric_std(rng, s.alpha), 0.0};
            }
            // isotropic: Brownian motion subordinated by a stable clock
            double T = std::pow(s.scale * s.t, 2.0 / s.alpha) *
                       stable_subordinator_std(rng, 0.5 * s.alpha);
            double sd = std::sqrt(2.0 * T);
            return {sd * rng.normal(), sd * rng.normal()};
        }
        case SamplerSpec::Variant::SubordinatedBM: {
            double T = s.power == 1.0
                           ? s.t
                           : std::pow(s.t, 1.0 / s.power) *
                                 stable_subordinator_std(rng, s.power);
            double sd = std::sqrt(2.0 * T);
            if (s.d == 1) return {sd * rng.normal(), 0.0};
            return {sd * rng.normal(), sd * rng.normal()};
        }
    }
    return {0.0, 0.0};
}

}  // namespace detail

/// N i.i.d. increments of the process at time t, deterministic given
/// the seed. Work fans out over fixed-size chunks with per-chunk
/// derived streams, so the result is independent of the thread count.
inline std::vector<Vec> sample_increments(const SamplerSpec& s) {
    if (s.N == 0) throw BadParameter("sample count must be positive");
    if (!(s.t > 0.0)) throw BadParameter("sampling time must be positive");
    if (s.variant == SamplerSpec::Variant::CompoundPoisson && s.atoms.empty())
        throw UnsupportedMeasure("compound Poisson sampler needs atoms");

    std::array<double, 3> chol{0.0, 0.0, 0.0};
    if (s.variant == SamplerSpec::Variant::Brownian) {
        double c00 = 2.0 * s.a.e[0][0] * s.t;
        double c01 = 2.0 * s.a.e[0][1] * s.t;
        double c11 = 2.0 * s.a.e[1][1] * s.t;
        chol[0] = std::sqrt(std::max(c00, 0.0));
        if (s.d == 2) {
            chol[1] = chol[0] > 0.0 ? c01 / chol[0] : 0.0;
            chol[2] = std::sqrt(std::max(c11 - chol[1] * chol[1], 0.0));
        }
    }
    std::vector<double> cum;
    double mass = 0.0;
    if (s.variant == SamplerSpec::Variant::CompoundPoisson) {
        for (const auto& a : s.atoms) {
            mass += a.w;
            cum.push_back(mass);
        }
    }

    const std::size_t chunk = 4096;
    const std::size_t n_chunks = (s.N + chunk - 1) / chunk;
    std::vector<Vec> out(s.N);
    parallel_for(n_chunks, [&](std::size_t c) {
        std::uint64_t state = s.seed;
        detail::splitmix64(state);
        state ^= 0x6A09E667F3BCC909ULL * (c + 1);
        detail::RngStream rng(state);
        std::size_t lo = c * chunk, hi = std::min(s.N, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i)
            out[i] = detail::draw_one(s, rng, chol, cum, mass);
    });
    return out;
}

struct EcfResult {
    std::vector<std::complex<double>> phi;
    double standard_error = 0.0;  // conservative 1/sqrt(N)
};

/// (1/N) sum of exp(i u . X_j) per requested frequency.
inline EcfResult empirical_characteristic_function(
    const std::vector<Vec>& samples, const std::vector<Vec>& u_list, int d) {
    if (samples.size() < 100)
        throw BadParameter("characteristic function estimate needs N >= 100");
    EcfResult out;
    out.standard_error = 1.0 / std::sqrt(static_cast<double>(samples.size()));
    out.phi.reserve(u_list.size());
    for (const auto& u : u_list) {
        std::complex<double> acc = 0.0;
        for (const auto& x : samples) {
            double phase = dot(u, x, d);
            acc += std::complex<double>(std::cos(phase), std::sin(phase));
        }
        out.phi.push_back(acc / static_cast<double>(samples.size()));
    }
    return out;
}

struct CfCheck {
    Vec u{0.0, 0.0};
    std::complex<double> ecf;
    double expected = 0.0;  // exp(-t eta(u)), real by symmetry
    double z_real = 0.0;
    double z_imag = 0.0;
};

struct CfReport {
    double t = 0.0;
    std::size_t N = 0;
    std::uint64_t seed = 0;
    std::vector<CfCheck> checks;
    double max_abs_z = 0.0;
    bool pass = false;  // every |z| <= 4
};

/// Levy-Khintchine identity test: the empirical characteristic
/// function against exp(-t eta(u)) at the given frequencies, z-scored
/// with the conservative 1/sqrt(N) standard error.
inline CfReport verify_characteristic_function(const SamplerSpec& s,
                                               const std::vector<Vec>& u_list) {
    auto samples = sample_increments(s);
    auto ecf = empirical_characteristic_function(samples, u_list, s.d);
    CfReport rep;
    rep.t = s.t;
    rep.N = s.N;
    rep.seed = s.seed;
    for (std::size_t i = 0; i < u_list.size(); ++i) {
        CfCheck c;
        c.u = u_list[i];
        c.ecf = ecf.phi[i];
        c.expected = std::exp(-s.t * sampler_exponent(s, u_list[i]));
        c.z_real = (c.ecf.real() - c.expected) / ecf.standard_error;
        c.z_imag = c.ecf.imag() / ecf.standard_error;
        rep.max_abs_z = std::max({rep.max_abs_z, std::abs(c.z_real),
                                  std::abs(c.z_imag)});
        rep.checks.push_back(c);
    }
    rep.pass = rep.max_abs_z <= 4.0;
    return rep;
}

struct SemigroupCheckPoint {
    Vec x{0.0, 0.0};
    double mc_mean = 0.0;
    double spectral = 0.0;
    double se = 0.0;
    double z = 0.0;
};

struct McSemigroupReport {
    double t = 0.0;
    std::size_t N = 0;
    std::uint64_t seed = 0;
    double wrap_fraction = 0.0;
    bool wrap_warning = false;  // raised when wrap mass exceeds 1%
    std::vector<SemigroupCheckPoint> points;
    double max_abs_z = 0.0;
    bool pass = false;
};

namespace detail {

// periodic linear interpolation of a physical-space grid function
inline double interp_periodic(const GridFunction& f, const Vec& x) {
    const auto& g = f.grid;
    double vals[2][2] = {{0, 0}, {0, 0}};
    int base[2] = {0, 0};
    double frac[2] = {0.0, 0.0};
    for (int ax = 0; ax < g.d; ++ax) {
        double rel = (x[ax] + 0.5 * g.L) / g.h();
        double fl = std::floor(rel);
        base[ax] = static_cast<int>(fl);
        frac[ax] = rel - fl;
    }
    auto at = [&](int i1, int i2) {
        int w1 = ((i1 % g.n) + g.n) % g.n;
        int w2 = ((i2 % g.n) + g.n) % g.n;
        std::size_t flat = g.d == 1 ? static_cast<std::size_t>(w1)
                                    : static_cast<std::size_t>(w1) * g.n + w2;
        return f.values[flat].real();
    };
    if (g.d == 1)
        return (1.0 - frac[0]) * at(base[0], 0) + frac[0] * at(base[0] + 1, 0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) vals[a][b] = at(base[0] + a, base[1] + b);
    double top = (1.0 - frac[1]) * vals[0][0] + frac[1] * vals[0][1];
    double bot = (1.0 - frac[1]) * vals[1][0] + frac[1] * vals[1][1];
    return (1.0 - frac[0]) * top + frac[0] * bot;
}

inline double wrap_coord(double x, double L) {
    double y = std::fmod(x + 0.5 * L, L);
    if (y < 0.0) y += L;
    return y - 0.5 * L;
}

}  // namespace detail

/// Statistical check of T_t f(x) = E f(x + X_t): Monte Carlo means with
/// periodic wrapping against the spectral semigroup, z-scored per
/// point. The evaluator defaults to periodic linear interpolation of f;
/// pass the exact function when available.
inline McSemigroupReport verify_semigroup_mc(
    const SamplerSpec& s, const GeneratorSpec& G, const GridFunction& f,
    const std::vector<Vec>& x_list,
    const std::function<double(const Vec&)>& f_exact = nullptr) {
    if (s.d != G.grid.d)
        throw MismatchedModel("sampler / generator dimension mismatch");
    // the sampler law and the generator symbol must agree
    for (std::size_t probe = 1; probe <= 3; ++probe) {
        std::size_t slot =
            (G.grid.size() / 2 + probe * (G.grid.size() / 7 + 1)) %
            G.grid.size();
        Vec u = G.grid.frequency(slot);
        double a = sampler_exponent(s, u);
        double b = G.symbol(u);
        if (std::abs(a - b) > 1e-6 * (1.0 + std::abs(a)))
            throw MismatchedModel("sampler law does not match generator symbol");
    }

    auto samples = sample_increments(s);
    GridFunction Tf = apply_semigroup(G, s.t, f);

    McSemigroupReport rep;
    rep.t = s.t;
    rep.N = s.N;
    rep.seed = s.seed;

    const double L = G.grid.L;
    std::size_t wrapped = 0;
    for (const auto& dx : samples)
        for (int ax = 0; ax < s.d; ++ax)
            if (std::abs(dx[ax]) > 0.5 * L) {
                ++wrapped;
                break;
            }
    rep.wrap_fraction = static_cast<double>(wrapped) / samples.size();
    rep.wrap_warning = rep.wrap_fraction > 0.01;

    for (const auto& x : x_list) {
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& dx : samples) {
            Vec y{detail::wrap_coord(x[0] + dx[0], L),
                  s.d == 2 ? detail::wrap_coord(x[1] + dx[1], L) : 0.0};
            double val = f_exact ? f_exact(y) : detail::interp_periodic(f, y);
            sum += val;
            sum_sq += val * val;
        }
        SemigroupCheckPoint p;
        p.x = x;
        double n = static_cast<double>(samples.size());
        p.mc_mean = sum / n;
        double var = std::max(sum_sq / n - p.mc_mean * p.mc_mean, 0.0);
        p.se = std::sqrt(var / n);
        p.spectral = detail::interp_periodic(Tf, x);
        if (p.se > 0.0) {
            p.z = (p.mc_mean - p.spectral) / p.se;
        } else {
            p.z = std::abs(p.mc_mean - p.spectral) <=
                          1e-10 * (1.0 + std::abs(p.spectral))
                      ? 0.0
                      : inf;
        }
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(p.z));
        rep.points.push_back(p);
    }
    rep.pass = rep.max_abs_z <= 4.0;
    return rep;
}

}  // namespace levyspec
