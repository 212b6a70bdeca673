#include <catch2/catch_amalgamated.hpp>

#include "levyspec/quadrature.hpp"
#include "support/test_helpers.hpp"

using namespace levyspec;

TEST_CASE("adaptive GK15 integrates smooth functions to tolerance") {
    auto q = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, pi,
                                1e-13);
    REQUIRE(q.converged);
    REQUIRE(q.value == Catch::Approx(2.0).margin(1e-13));

    auto g = integrate_adaptive([](double x) { return std::exp(-x * x); },
                                -8.0, 8.0, 1e-13);
    REQUIRE(g.value == Catch::Approx(std::sqrt(pi)).margin(1e-12));
}

TEST_CASE("adaptive GK15 reports non-convergence on exhausted budget") {
    auto q = integrate_adaptive([](double x) { return std::sin(500.0 * x); },
                                0.0, 1000.0, 1e-14, 3);
    REQUIRE_FALSE(q.converged);
}

TEST_CASE("singular-origin integrator handles r^(sigma-1) integrands") {
    // integral of r^{-1/2} over (0, 1] = 2
    auto q = integrate_singular_origin(
        [](double r) { return 1.0 / std::sqrt(r); }, 1.0, 0.5, 1e-12);
    REQUIRE(q.converged);
    REQUIRE(q.value == Catch::Approx(2.0).margin(1e-10));

    // integral of r^{0.9} log-ish integrand: r^{-0.1} over (0, 2]
    auto p = integrate_singular_origin(
        [](double r) { return std::pow(r, -0.1); }, 2.0, 0.9, 1e-12);
    REQUIRE(p.value == Catch::Approx(std::pow(2.0, 0.9) / 0.9).margin(1e-9));
}

TEST_CASE("singular-origin integrator rejects divergent exponents") {
    REQUIRE_THROWS_AS(integrate_singular_origin(
                          [](double r) { return 1.0 / r; }, 1.0, 0.0, 1e-10),
                      DivergentMeasure);
}

TEST_CASE("decaying panel summation handles oscillatory tails") {
    // integral of exp(-x/10) cos(x) over [0, inf) = (1/10) / (1 + 1/100)
    auto q = integrate_decaying_panels(
        [](double x) { return std::exp(-0.1 * x) * std::cos(x); }, 0.0, pi,
        1e-10);
    REQUIRE(q.converged);
    REQUIRE(q.value == Catch::Approx(0.1 / 1.01).margin(1e-9));
}
