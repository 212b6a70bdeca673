#include <catch2/catch_amalgamated.hpp>

#include "levyspec/operators.hpp"
#include "support/test_helpers.hpp"

using namespace levyspec;

namespace {

std::vector<Atom> half_atoms() {
    return {{{1.0, 0.0}, 0.5}, {{-1.0, 0.0}, 0.5}};
}

GridFunction random_real(const PeriodicGrid& g, std::uint64_t seed) {
    auto gen = testsupport::rng(seed);
    GridFunction f = GridFunction::zeros(g);
    for (auto& v : f.values) v = testsupport::uniform(gen, -1.0, 1.0);
    return f;
}

}  // namespace

TEST_CASE("lattice waves are eigenfunctions: A e^{iux} = -eta(u) e^{iux}") {
    auto g = PeriodicGrid::make(1, 64, 16.0);
    std::vector<Symbol> suite;
    suite.push_back(Symbol::laplacian(1));
    suite.push_back(Symbol::compound_poisson(1, half_atoms()));
    for (const auto& s : suite) {
        auto G = make_generator(s, g);
        for (int k : {1, 5, -9, 31, -32}) {
            double y = 2.0 * pi * k / g.L;
            auto wave = sample_complex(g, [y](const Vec& x) {
                return std::exp(std::complex<double>(0.0, y * x[0]));
            });
            auto Aw = apply_generator(G, wave);
            double eta = s(vec1(y));
            for (std::size_t i = 0; i < g.size(); ++i)
                REQUIRE(std::abs(Aw.values[i] + eta * wave.values[i]) <=
                        1e-12 * (1.0 + eta));
        }
    }
}

TEST_CASE("single sine mode under the Laplacian") {
    auto g = PeriodicGrid::make(1, 128, 10.0);
    auto G = make_generator(Symbol::laplacian(1), g);
    double y = 2.0 * pi / g.L;
    auto f = sample(g, [y](const Vec& x) { return std::sin(y * x[0]); });
    auto Af = apply_generator(G, f);
    for (std::size_t i = 0; i < g.size(); ++i)
        REQUIRE(std::abs(Af.values[i] + y * y * f.values[i]) <= 1e-12);
}

TEST_CASE("constants are annihilated") {
    auto g = PeriodicGrid::make(1, 64, 8.0);
    auto G = make_generator(Symbol::compound_poisson(1, half_atoms()), g);
    auto ones = sample(g, [](const Vec&) { return 1.0; });
    REQUIRE(max_abs(apply_generator(G, ones)) <= 1e-13);
}

TEST_CASE("generator output on real data is real") {
    auto g = PeriodicGrid::make(1, 128, 20.0);
    for (const Symbol& s :
         {Symbol::laplacian(1), Symbol::relativistic(1, 1.0),
          Symbol::compound_poisson(1, half_atoms())}) {
        auto G = make_generator(s, g);
        auto f = random_real(g, 99);
        REQUIRE(max_imag(apply_generator(G, f)) <= 1e-12 * max_abs(f));
    }
}

TEST_CASE("semigroup: identity at t = 0 and the heat-kernel anchor") {
    auto g = PeriodicGrid::make(1, 512, 40.0);
    auto G = make_generator(Symbol::laplacian(1), g);
    auto f = sample(g, [](const Vec& x) { return std::exp(-0.5 * x[0] * x[0]); });

    auto same = apply_semigroup(G, 0.0, f);
    REQUIRE(sup_distance(same, f) == 0.0);

    for (double t : {0.1, 0.5, 1.0}) {
        auto ft = apply_semigroup(G, t, f);
        auto exact = sample(g, [t](const Vec& x) {
            return std::exp(-0.5 * x[0] * x[0] / (1.0 + 2.0 * t)) /
                   std::sqrt(1.0 + 2.0 * t);
        });
        REQUIRE(sup_distance(ft, exact) <= 1e-8);
    }

    REQUIRE_THROWS_AS(apply_semigroup(G, -0.5, f), BadParameter);
}

TEST_CASE("semigroup law and contraction") {
    auto g = PeriodicGrid::make(1, 128, 16.0);
    auto G = make_generator(Symbol::compound_poisson(1, half_atoms()), g);
    auto f = random_real(g, 12);

    auto one_step = apply_semigroup(G, 0.7, f);
    auto two_step = apply_semigroup(G, 0.3, apply_semigroup(G, 0.4, f));
    REQUIRE(sup_distance(one_step, two_step) <= 1e-12 * max_abs(f));

    double n0 = l2_norm(f);
    for (double t : {0.01, 0.5, 3.0})
        REQUIRE(l2_norm(apply_semigroup(G, t, f)) <= n0 * (1.0 + 1e-13));
}

TEST_CASE("self-adjointness and negativity") {
    auto g = PeriodicGrid::make(1, 64, 12.0);
    for (const Symbol& s :
         {Symbol::laplacian(1), Symbol::compound_poisson(1, half_atoms())}) {
        auto G = make_generator(s, g);
        for (int trial = 0; trial < 10; ++trial) {
            auto f = random_real(g, 100 + trial);
            auto h = random_real(g, 200 + trial);
            auto Tf = apply_semigroup(G, 0.4, f);
            auto Th = apply_semigroup(G, 0.4, h);
            double lhs = inner_product(Tf, h).real();
            double rhs = inner_product(f, Th).real();
            REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-10).margin(1e-12));

            auto Af = apply_generator(G, f);
            auto Ah = apply_generator(G, h);
            double a_lhs = inner_product(Af, h).real();
            double a_rhs = inner_product(f, Ah).real();
            REQUIRE(a_lhs == Catch::Approx(a_rhs).epsilon(1e-10).margin(1e-12));

            double nf = l2_norm(f);
            REQUIRE(inner_product(Af, f).real() / (nf * nf) <= 1e-10);
        }
    }
}

TEST_CASE("resolvent: positive lambda inverts, spectral lambda is refused") {
    auto g = PeriodicGrid::make(1, 128, 16.0);

    auto lap = make_generator(Symbol::laplacian(1), g);
    auto rhs = random_real(g, 44);
    auto r = apply_resolvent(lap, 1.0, rhs);
    auto residual = apply_generator(lap, r);
    for (std::size_t i = 0; i < g.size(); ++i)
        residual.values[i] = r.values[i] - residual.values[i] - rhs.values[i];
    REQUIRE(l2_norm(residual) / l2_norm(rhs) <= 1e-10);

    // -4 = -eta(2) lies in Ran(-eta) for the Laplacian
    REQUIRE_THROWS_AS(apply_resolvent(lap, -4.0, rhs), SpectrumProximity);
    REQUIRE_THROWS_AS(apply_resolvent(lap, -1.0, rhs), SpectrumProximity);

    // the bounded atom generator admits lambda = -3 < -K = -2
    auto cp = make_generator(Symbol::compound_poisson(1, half_atoms()), g);
    REQUIRE_THROWS_AS(apply_resolvent(cp, -1.0, rhs), SpectrumProximity);
    auto rc = apply_resolvent(cp, -3.0, rhs);
    auto resc = apply_generator(cp, rc);
    for (std::size_t i = 0; i < g.size(); ++i)
        resc.values[i] = -3.0 * rc.values[i] - resc.values[i] - rhs.values[i];
    REQUIRE(l2_norm(resc) / l2_norm(rhs) <= 1e-10);

    // resolvent multiplier bound sup |(1 + eta)/(lambda + eta)| <= (1 + K)/eps
    double K = cp.classification.K_hat;
    double eps = 3.0 - K;
    for (double eta : cp.multiplier)
        REQUIRE((1.0 + eta) / std::abs(-3.0 + eta) <= (1.0 + K) / eps + 1e-9);
}

TEST_CASE("resolvent identity R_lambda - R_mu = (mu - lambda) R_lambda R_mu") {
    auto g = PeriodicGrid::make(1, 64, 8.0);
    auto G = make_generator(Symbol::relativistic(1, 1.0), g);
    auto f = random_real(g, 7);
    double lam = 1.0, mu = 2.0;
    auto lhs = apply_resolvent(G, lam, f);
    auto rmu = apply_resolvent(G, mu, f);
    for (std::size_t i = 0; i < g.size(); ++i)
        lhs.values[i] -= rmu.values[i];
    auto rhs = apply_resolvent(G, lam, rmu);
    for (std::size_t i = 0; i < g.size(); ++i)
        rhs.values[i] *= (mu - lam);
    REQUIRE(sup_distance(lhs, rhs) <= 1e-10 * max_abs(f));
}

TEST_CASE("sobolev norm diagnostics") {
    auto g = PeriodicGrid::make(1, 256, 40.0);
    auto G = make_generator(Symbol::laplacian(1), g);

    REQUIRE(sobolev_norm(G, GridFunction::zeros(g)) == 0.0);

    // single unit coefficient at lattice frequency y0
    GridFunction mode = GridFunction::zeros(g, Space::Frequency);
    int k0 = 20;
    mode.values[g.n / 2 + k0] = 1.0;
    double y0 = 2.0 * pi * k0 / g.L;
    double expect = std::sqrt((1.0 + std::pow(y0, 4.0)) * (2.0 * pi / g.L));
    REQUIRE(sobolev_norm(G, mode) == Catch::Approx(expect).epsilon(1e-12));

    // self-convergence on Gaussian data between n = 256 and n = 512
    auto gauss = [](const Vec& x) { return std::exp(-0.5 * x[0] * x[0]); };
    double n256 = sobolev_norm(G, sample(g, gauss));
    auto g2 = PeriodicGrid::make(1, 512, 40.0);
    auto G2 = make_generator(Symbol::laplacian(1), g2);
    double n512 = sobolev_norm(G2, sample(g2, gauss));
    REQUIRE(std::abs(n256 - n512) <= 1e-6);
}

TEST_CASE("direct generator: diffusion, constants, and the atom example") {
    C2Function xsq{[](const Vec& x) { return x[0] * x[0]; },
                   [](const Vec&) {
                       return std::array<std::array<double, 2>, 2>{
                           {{2.0, 0.0}, {0.0, 0.0}}};
                   },
                   inf, inf};
    auto t_diff = LevyTriplet::make(DiffusionMatrix::identity(1),
                                    LevyMeasure::zero(1));
    REQUIRE(direct_generator(t_diff, xsq, vec1(0.0)) == 2.0);

    C2Function constant{[](const Vec&) { return 1.0; },
                        [](const Vec&) {
                            return std::array<std::array<double, 2>, 2>{
                                {{0.0, 0.0}, {0.0, 0.0}}};
                        },
                        inf, 1.0};
    auto t_atoms = LevyTriplet::make(DiffusionMatrix::zero(1),
                                     LevyMeasure::atoms(1, half_atoms()));
    REQUIRE(direct_generator(t_atoms, constant, vec1(0.3)) == 0.0);

    // f = cos at x = 0 for the half-weight atom pair: the jump part is
    // (1/2) sum_j w_j (cos(y_j) - 2 + cos(-y_j)) = cos(1) - 1
    C2Function cosine{[](const Vec& x) { return std::cos(x[0]); },
                      [](const Vec& x) {
                          return std::array<std::array<double, 2>, 2>{
                              {{-std::cos(x[0]), 0.0}, {0.0, 0.0}}};
                      },
                      inf, 1.0};
    REQUIRE(direct_generator(t_atoms, cosine, vec1(0.0)) ==
            Catch::Approx(std::cos(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("spectral and direct generators agree") {
    C2Function gauss{
        [](const Vec& x) { return std::exp(-0.5 * x[0] * x[0]); },
        [](const Vec& x) {
            double v = std::exp(-0.5 * x[0] * x[0]);
            return std::array<std::array<double, 2>, 2>{
                {{(x[0] * x[0] - 1.0) * v, 0.0}, {0.0, 0.0}}};
        },
        12.0, 1.0};

    // atoms on grid nodes
    auto g = PeriodicGrid::make(1, 512, 32.0);
    auto t = LevyTriplet::make(DiffusionMatrix::zero(1),
                               LevyMeasure::atoms(1, half_atoms()));
    auto G = make_generator(quadrature_symbol(t), g);
    auto f = sample(g, gauss.value);
    auto Af = apply_generator(G, f);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(Af.values[i].real() -
                                         direct_generator(t, gauss, g.point(i))));
    REQUIRE(worst <= 1e-8);

    // finite radial density (integrable, smooth)
    auto t_rad = LevyTriplet::make(
        DiffusionMatrix::zero(1),
        LevyMeasure::radial(1, [](double r) { return std::exp(-r); }, -1.0,
                            TailDecay{TailDecay::Kind::Exponential, 1.0, 1.0}));
    auto G_rad = make_generator(quadrature_symbol(t_rad), g);
    auto Af_rad = apply_generator(G_rad, f);
    double worst_rad = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 7)
        worst_rad = std::max(
            worst_rad, std::abs(Af_rad.values[i].real() -
                                direct_generator(t_rad, gauss, g.point(i))));
    REQUIRE(worst_rad <= 1e-6);
}

TEST_CASE("bounded jump norm check") {
    auto g = PeriodicGrid::make(1, 64, 64.0);  // h = 1, pi on the lattice
    auto t = LevyTriplet::make(
        DiffusionMatrix::zero(1),
        LevyMeasure::atoms(1, {{{1.0, 0.0}, 0.5}, {{-1.0, 0.0}, 0.5}}));
    auto rep = bounded_jump_norm_check(t, 25, g, 7);
    REQUIRE(rep.mass == 1.0);
    REQUIRE(rep.pass);
    REQUIRE(rep.max_ratio <= 2.0 + 1e-9);
    REQUIRE(rep.max_ratio <= rep.crude_bound);

    // a wave at frequency pi realizes the sharp bound
    auto G = make_generator(Symbol::compound_poisson(1, t.nu.as_atoms().atoms),
                            g);
    auto wave = sample(g, [](const Vec& x) { return std::cos(pi * x[0]); });
    REQUIRE(l2_norm(apply_generator(G, wave)) / l2_norm(wave) >= 2.0 - 1e-9);

    auto t_stable = LevyTriplet::make(DiffusionMatrix::zero(1),
                                      LevyMeasure::stable(1, 1.0, 1.0));
    REQUIRE_THROWS_AS(bounded_jump_norm_check(t_stable, 3, g), NotFinite);

    auto t_zero = LevyTriplet::make(DiffusionMatrix::zero(1),
                                    LevyMeasure::zero(1));
    auto rep_zero = bounded_jump_norm_check(t_zero, 3, g);
    REQUIRE(rep_zero.max_ratio == 0.0);
    REQUIRE(rep_zero.pass);
}

TEST_CASE("generator construction guards") {
    auto g = PeriodicGrid::make(1, 64, 8.0);
    REQUIRE_THROWS_AS(make_generator(Symbol::laplacian(2), g),
                      MismatchedModel);
    auto G = make_generator(Symbol::laplacian(1), g);
    REQUIRE(G.multiplier[g.n / 2] == 0.0);
    for (double eta : G.multiplier) REQUIRE(eta >= 0.0);
}
