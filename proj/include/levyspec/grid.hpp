#pragma once

#include <fftw3.h>

#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "levyspec/common.hpp"

namespace levyspec {

/// Uniform periodic grid on [-L/2, L/2)^d with n (a power of two)
/// points per axis. Frequency storage is centered: slot i on an axis
/// holds lattice frequency 2*pi*(i - n/2)/L, so the lattice runs over
/// k = -n/2 .. n/2 - 1 in storage order.
struct PeriodicGrid {
    int d = 1;
    int n = 8;
    double L = 2.0 * pi;

    static PeriodicGrid make(int d, int n, double L) {
        if (d != 1 && d != 2) throw BadParameter("grid dimension must be 1 or 2");
        if (n < 8 || (n & (n - 1)) != 0)
            throw BadParameter("grid size must be a power of two >= 8");
        if (!(L > 0.0)) throw BadParameter("grid period must be positive");
        return PeriodicGrid{d, n, L};
    }

    double h() const { return L / n; }
    std::size_t size() const {
        return d == 1 ? static_cast<std::size_t>(n)
                      : static_cast<std::size_t>(n) * n;
    }

    double coord(int i) const { return -0.5 * L + h() * i; }
    double freq(int i) const { return 2.0 * pi * (i - n / 2) / L; }

    Vec point(std::size_t flat) const {
        if (d == 1) return {coord(static_cast<int>(flat)), 0.0};
        return {coord(static_cast<int>(flat / n)),
                coord(static_cast<int>(flat % n))};
    }

    Vec frequency(std::size_t flat) const {
        if (d == 1) return {freq(static_cast<int>(flat)), 0.0};
        return {freq(static_cast<int>(flat / n)),
                freq(static_cast<int>(flat % n))};
    }

    bool operator==(const PeriodicGrid&) const = default;
};

enum class Space { Physical, Frequency };

struct GridFunction {
    PeriodicGrid grid;
    Space space = Space::Physical;
    std::vector<std::complex<double>> values;

    static GridFunction zeros(const PeriodicGrid& g,
                              Space s = Space::Physical) {
        return {g, s, std::vector<std::complex<double>>(g.size())};
    }
};

/// values[i] = f(x_i) over the physical lattice.
inline GridFunction sample(const PeriodicGrid& g,
                           const std::function<double(const Vec&)>& f) {
    GridFunction out = GridFunction::zeros(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = f(g.point(i));
    return out;
}

inline GridFunction sample_complex(
    const PeriodicGrid& g,
    const std::function<std::complex<double>(const Vec&)>& f) {
    GridFunction out = GridFunction::zeros(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = f(g.point(i));
    return out;
}

/// Lattice vectors in the same storage order as frequency-space values
/// (row-major over axes).
inline std::vector<Vec> frequency_lattice(const PeriodicGrid& g) {
    std::vector<Vec> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g.frequency(i);
    return out;
}

namespace detail {

// FFTW plan creation is not thread safe; execution is.
inline std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

inline void run_dft(std::vector<std::complex<double>>& data, int d, int n,
                    int sign) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = (d == 1) ? fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE)
                        : fftw_plan_dft_2d(n, n, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
}

// standard DFT index m <-> signed lattice index k = m or m - n
inline int signed_index(int m, int n) { return m < n / 2 ? m : m - n; }

}  // namespace detail

// Transform convention
// --------------------
// forward:  F(y_k) = h^d (2*pi)^{-d/2} sum_j exp(-i x_j . y_k) f(x_j)
// inverse:  f(x_j) = (2*pi)^{d/2} L^{-d} sum_k exp(+i x_j . y_k) F(y_k)
// These are the Riemann sums of the continuum transform pair with
// dx = h^d and dy = (2*pi/L)^d, and they satisfy the discrete Parseval
// identity  sum |f(x_j)|^2 h^d = sum |F(y_k)|^2 (2*pi/L)^d  exactly.
// Centered grids make exp(-i x_j . y_k) = (-1)^k exp(-2*pi*i jk/n) per
// axis, handled below by sign-and-shift remapping around the plain DFT.

inline GridFunction forward_transform(const GridFunction& f) {
    if (f.space != Space::Physical)
        throw BadParameter("forward_transform expects physical-space data");
    const auto& g = f.grid;
    GridFunction out{g, Space::Frequency, f.values};
    detail::run_dft(out.values, g.d, g.n, FFTW_FORWARD);
    double scale = std::pow(g.h() / std::sqrt(2.0 * pi), g.d);
    std::vector<std::complex<double>> remapped(out.values.size());
    if (g.d == 1) {
        for (int i = 0; i < g.n; ++i) {
            int k = i - g.n / 2;
            int m = (k + g.n) % g.n;
            double sign = (k & 1) ? -1.0 : 1.0;
            remapped[i] = sign * scale * out.values[m];
        }
    } else {
        for (int i1 = 0; i1 < g.n; ++i1)
            for (int i2 = 0; i2 < g.n; ++i2) {
                int k1 = i1 - g.n / 2, k2 = i2 - g.n / 2;
                int m1 = (k1 + g.n) % g.n, m2 = (k2 + g.n) % g.n;
                double sign = ((k1 + k2) & 1) ? -1.0 : 1.0;
                remapped[i1 * g.n + i2] = sign * scale * out.values[m1 * g.n + m2];
            }
    }
    out.values = std::move(remapped);
    return out;
}

inline GridFunction inverse_transform(const GridFunction& F) {
    if (F.space != Space::Frequency)
        throw BadParameter("inverse_transform expects frequency-space data");
    const auto& g = F.grid;
    GridFunction out{g, Space::Physical,
                     std::vector<std::complex<double>>(g.size())};
    // undo the sign-and-shift remapping, then run the backward DFT
    if (g.d == 1) {
        for (int m = 0; m < g.n; ++m) {
            int k = detail::signed_index(m, g.n);
            double sign = (k & 1) ? -1.0 : 1.0;
            out.values[m] = sign * F.values[k + g.n / 2];
        }
    } else {
        for (int m1 = 0; m1 < g.n; ++m1)
            for (int m2 = 0; m2 < g.n; ++m2) {
                int k1 = detail::signed_index(m1, g.n);
                int k2 = detail::signed_index(m2, g.n);
                double sign = ((k1 + k2) & 1) ? -1.0 : 1.0;
                out.values[m1 * g.n + m2] =
                    sign * F.values[(k1 + g.n / 2) * g.n + (k2 + g.n / 2)];
            }
    }
    detail::run_dft(out.values, g.d, g.n, FFTW_BACKWARD);
    double scale = std::pow(std::sqrt(2.0 * pi) / g.L, g.d);
    for (auto& v : out.values) v *= scale;
    return out;
}

/// Discrete L2 norm: h^d weight in physical space, (2*pi/L)^d weight in
/// frequency space (the Parseval pairing above).
inline double l2_norm(const GridFunction& f) {
    double w = f.space == Space::Physical
                   ? std::pow(f.grid.h(), f.grid.d)
                   : std::pow(2.0 * pi / f.grid.L, f.grid.d);
    double s = 0.0;
    for (const auto& v : f.values) s += std::norm(v);
    return std::sqrt(s * w);
}

inline std::complex<double> inner_product(const GridFunction& f,
                                          const GridFunction& g) {
    if (f.grid != g.grid || f.space != g.space)
        throw MismatchedModel("inner product of incompatible grid functions");
    double w = f.space == Space::Physical
                   ? std::pow(f.grid.h(), f.grid.d)
                   : std::pow(2.0 * pi / f.grid.L, f.grid.d);
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        s += std::conj(f.values[i]) * g.values[i];
    return s * w;
}

inline double max_abs(const GridFunction& f) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline double max_imag(const GridFunction& f) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v.imag()));
    return m;
}

inline double sup_distance(const GridFunction& f, const GridFunction& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        m = std::max(m, std::abs(f.values[i] - g.values[i]));
    return m;
}

/// CSV serialization: a one-line JSON header carrying {d, n, L, space},
/// a column header, then one row per node with index coordinates and
/// the complex value printed to 17 significant digits.
inline void save_csv(const GridFunction& f, std::ostream& os) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "{\"L\":%.17g,\"d\":%d,\"n\":%d,\"space\":\"%s\"}",
                  f.grid.L, f.grid.d, f.grid.n,
                  f.space == Space::Physical ? "physical" : "frequency");
    os << buf << "\n";
    os << (f.grid.d == 1 ? "i0,re,im" : "i0,i1,re,im") << "\n";
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (f.grid.d == 1)
            std::snprintf(buf, sizeof(buf), "%zu,", i);
        else
            std::snprintf(buf, sizeof(buf), "%zu,%zu,", i / f.grid.n,
                          i % f.grid.n);
        os << buf;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", f.values[i].real(),
                      f.values[i].imag());
        os << buf << "\n";
    }
}

inline void save_csv(const GridFunction& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    save_csv(f, os);
}

inline GridFunction load_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw Error("empty grid-function stream");
    auto grab = [&](const std::string& key) -> std::string {
        auto pos = header.find("\"" + key + "\":");
        if (pos == std::string::npos)
            throw Error("grid-function header missing field " + key);
        pos += key.size() + 3;
        auto end = header.find_first_of(",}", pos);
        return header.substr(pos, end - pos);
    };
    int d = std::stoi(grab("d"));
    int n = std::stoi(grab("n"));
    double L = std::stod(grab("L"));
    std::string space = grab("space");
    auto g = PeriodicGrid::make(d, n, L);
    GridFunction out = GridFunction::zeros(
        g, space.find("frequency") != std::string::npos ? Space::Frequency
                                                        : Space::Physical);
    std::string line;
    std::getline(is, line);  // column header
    std::size_t count = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::size_t i0 = 0, i1 = 0;
        double re = 0.0, im = 0.0;
        int got = (d == 1) ? std::sscanf(line.c_str(), "%zu,%lf,%lf", &i0, &re, &im)
                           : std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &i0,
                                         &i1, &re, &im);
        if (got != (d == 1 ? 3 : 4)) throw Error("malformed grid-function row");
        std::size_t flat = (d == 1) ? i0 : i0 * n + i1;
        if (flat >= out.values.size()) throw Error("grid-function row out of range");
        out.values[flat] = {re, im};
        ++count;
    }
    if (count != out.values.size())
        throw Error("grid-function row count mismatch");
    return out;
}

inline GridFunction load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return load_csv(is);
}

}  // namespace levyspec
