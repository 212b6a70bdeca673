#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "levyspec/grid.hpp"
#include "support/test_helpers.hpp"

using namespace levyspec;

TEST_CASE("grid construction enforces its invariants") {
    REQUIRE_THROWS_AS(PeriodicGrid::make(1, 7, 1.0), BadParameter);
    REQUIRE_THROWS_AS(PeriodicGrid::make(1, 4, 1.0), BadParameter);
    REQUIRE_THROWS_AS(PeriodicGrid::make(1, 8, 0.0), BadParameter);
    REQUIRE_THROWS_AS(PeriodicGrid::make(3, 8, 1.0), BadParameter);
    auto g = PeriodicGrid::make(2, 16, 4.0);
    REQUIRE(g.size() == 256);
    REQUIRE(g.h() == 0.25);
}

TEST_CASE("frequency lattice ordering") {
    auto g = PeriodicGrid::make(1, 8, 2.0 * pi);
    auto lattice = frequency_lattice(g);
    for (int k = 0; k < 8; ++k)
        REQUIRE(lattice[k][0] == Catch::Approx(k - 4.0).margin(1e-15));

    auto g2 = PeriodicGrid::make(1, 8, 4.0 * pi);
    auto lattice2 = frequency_lattice(g2);
    REQUIRE(lattice2.front()[0] == Catch::Approx(-2.0).margin(1e-15));
    REQUIRE(lattice2[1][0] == Catch::Approx(-1.5).margin(1e-15));
    REQUIRE(lattice2.back()[0] == Catch::Approx(1.5).margin(1e-15));

    auto gd = PeriodicGrid::make(2, 8, 2.0 * pi);
    auto lat2 = frequency_lattice(gd);
    REQUIRE(lat2.size() == 64);
    // row-major over axes
    for (int i1 = 0; i1 < 8; ++i1)
        for (int i2 = 0; i2 < 8; ++i2) {
            REQUIRE(lat2[i1 * 8 + i2][0] == Catch::Approx(i1 - 4.0));
            REQUIRE(lat2[i1 * 8 + i2][1] == Catch::Approx(i2 - 4.0));
        }
}

TEST_CASE("sampling basics") {
    auto g = PeriodicGrid::make(1, 16, 8.0);
    auto zero = sample(g, [](const Vec&) { return 0.0; });
    REQUIRE(max_abs(zero) == 0.0);

    auto left = sample(g, [](const Vec& x) { return x[0] < 0.0 ? 1.0 : 0.0; });
    int ones = 0;
    for (const auto& v : left.values) ones += v.real() == 1.0;
    REQUIRE(ones == 8);

    auto gauss = sample(g, [](const Vec& x) { return std::exp(-x[0] * x[0]); });
    REQUIRE(gauss.values[8].real() == 1.0);  // x = 0 sits at index n/2
    for (int i = 1; i < 8; ++i)
        REQUIRE(gauss.values[8 - i].real() ==
                Catch::Approx(gauss.values[8 + i].real()).epsilon(1e-15));
}

TEST_CASE("transform of a constant concentrates at frequency zero") {
    auto g = PeriodicGrid::make(1, 64, 10.0);
    auto f = sample(g, [](const Vec&) { return 1.0; });
    auto F = forward_transform(f);
    double expected = g.L / std::sqrt(2.0 * pi);
    REQUIRE(F.values[32].real() == Catch::Approx(expected).epsilon(1e-14));
    for (int k = 0; k < 64; ++k)
        if (k != 32) REQUIRE(std::abs(F.values[k]) < 1e-12 * expected);
}

TEST_CASE("pure wave maps to a single lattice coefficient") {
    auto g = PeriodicGrid::make(1, 32, 4.0);
    int k0 = 5;  // lattice index offset from center
    double y0 = 2.0 * pi * k0 / g.L;
    auto f = sample_complex(g, [y0](const Vec& x) {
        return std::exp(std::complex<double>(0.0, y0 * x[0]));
    });
    auto F = forward_transform(f);
    std::size_t slot = g.n / 2 + k0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i == slot) continue;
        REQUIRE(std::abs(F.values[i]) < 1e-12 * std::abs(F.values[slot]));
    }
}

TEST_CASE("sampled Gaussian matches its closed-form transform") {
    auto g = PeriodicGrid::make(1, 512, 40.0);
    auto f = sample(g, [](const Vec& x) { return std::exp(-0.5 * x[0] * x[0]); });
    auto F = forward_transform(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double y = g.frequency(i)[0];
        if (std::abs(y) > 4.0) continue;
        REQUIRE(std::abs(F.values[i] - std::exp(-0.5 * y * y)) < 1e-10);
    }

    // two-dimensional version
    auto g2 = PeriodicGrid::make(2, 128, 40.0);
    auto f2 = sample(g2, [](const Vec& x) {
        return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
    });
    auto F2 = forward_transform(f2);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        Vec y = g2.frequency(i);
        double r2 = y[0] * y[0] + y[1] * y[1];
        if (r2 > 16.0) continue;
        REQUIRE(std::abs(F2.values[i] - std::exp(-0.5 * r2)) < 1e-10);
    }
}

TEST_CASE("round trip, zeros, and frequency spikes") {
    auto g = PeriodicGrid::make(1, 64, 12.0);
    auto gen = testsupport::rng(3);
    GridFunction f = GridFunction::zeros(g);
    for (auto& v : f.values) v = testsupport::uniform(gen, -1.0, 1.0);
    auto back = inverse_transform(forward_transform(f));
    REQUIRE(sup_distance(back, f) <= 1e-13 * max_abs(f));

    GridFunction zero = GridFunction::zeros(g, Space::Frequency);
    REQUIRE(max_abs(inverse_transform(zero)) == 0.0);

    // spike at one frequency inverts to a complex exponential
    GridFunction spike = GridFunction::zeros(g, Space::Frequency);
    int k0 = 7;
    spike.values[g.n / 2 + k0] = 1.0;
    auto wave = inverse_transform(spike);
    double y0 = 2.0 * pi * k0 / g.L;
    double amp = std::sqrt(2.0 * pi) / g.L;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto expect = amp * std::exp(std::complex<double>(0.0, y0 * g.point(i)[0]));
        REQUIRE(std::abs(wave.values[i] - expect) < 1e-14);
    }
}

TEST_CASE("documented discrete Parseval identity") {
    // sum |f(x_j)|^2 h^d = sum |F(y_k)|^2 (2 pi / L)^d
    auto gen = testsupport::rng(11);
    for (int d : {1, 2}) {
        auto g = PeriodicGrid::make(d, d == 1 ? 128 : 32, 17.0);
        GridFunction f = GridFunction::zeros(g);
        for (auto& v : f.values)
            v = {testsupport::uniform(gen, -1.0, 1.0),
                 testsupport::uniform(gen, -1.0, 1.0)};
        auto F = forward_transform(f);
        REQUIRE(l2_norm(F) == Catch::Approx(l2_norm(f)).epsilon(1e-12));
    }
}

TEST_CASE("real data has Hermitian frequency symmetry") {
    auto g = PeriodicGrid::make(1, 64, 9.0);
    auto gen = testsupport::rng(13);
    GridFunction f = GridFunction::zeros(g);
    for (auto& v : f.values) v = testsupport::uniform(gen, -1.0, 1.0);
    auto F = forward_transform(f);
    double scale = max_abs(F);
    for (int k = 1 - g.n / 2; k < g.n / 2; ++k) {
        auto a = F.values[g.n / 2 + k];
        auto b = std::conj(F.values[g.n / 2 - k]);
        REQUIRE(std::abs(a - b) <= 1e-12 * scale);
    }
}

TEST_CASE("even multiplier keeps real data real through a round trip") {
    auto g = PeriodicGrid::make(1, 64, 9.0);
    auto gen = testsupport::rng(29);
    GridFunction f = GridFunction::zeros(g);
    for (auto& v : f.values) v = testsupport::uniform(gen, -1.0, 1.0);
    auto F = forward_transform(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double y = std::abs(g.frequency(i)[0]);
        F.values[i] *= std::exp(-0.3 * y * y) + 0.1 * y;  // even in y
    }
    auto out = inverse_transform(F);
    REQUIRE(max_imag(out) <= 1e-12 * std::max(1.0, max_abs(out)));
}

TEST_CASE("grid-function CSV round trip is exact") {
    auto g = PeriodicGrid::make(2, 8, 3.0);
    auto gen = testsupport::rng(41);
    GridFunction f = GridFunction::zeros(g, Space::Frequency);
    for (auto& v : f.values)
        v = {testsupport::uniform(gen, -5.0, 5.0),
             testsupport::uniform(gen, -5.0, 5.0)};
    std::stringstream ss;
    save_csv(f, ss);
    auto loaded = load_csv(ss);
    REQUIRE(loaded.grid == f.grid);
    REQUIRE(loaded.space == f.space);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        REQUIRE(loaded.values[i] == f.values[i]);
}
