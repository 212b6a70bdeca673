#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace levyspec {

inline constexpr double pi = 3.14159265358979323846;

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadParameter : Error { using Error::Error; };
struct DivergentMeasure : Error { using Error::Error; };
struct OriginAtom : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct SpectrumProximity : Error { using Error::Error; };
struct AtomOffGrid : Error { using Error::Error; };
struct NotFinite : Error { using Error::Error; };
struct UnsupportedMeasure : Error { using Error::Error; };
struct MismatchedModel : Error { using Error::Error; };

// Points and frequencies live in at most two dimensions; unused
// components are kept at zero so a Vec can be passed around without
// carrying its ambient dimension.
using Vec = std::array<double, 2>;

inline Vec vec1(double x) { return Vec{x, 0.0}; }
inline Vec vec2(double x, double y) { return Vec{x, y}; }

inline double dot(const Vec& a, const Vec& b, int d) {
    double s = a[0] * b[0];
    if (d == 2) s += a[1] * b[1];
    return s;
}

inline double norm_sq(const Vec& a, int d) { return dot(a, a, d); }
inline double norm(const Vec& a, int d) { return std::sqrt(norm_sq(a, d)); }

inline Vec negate(const Vec& a) { return Vec{-a[0], -a[1]}; }

/// Worker count for internally parallel operations, capped by the
/// LEVYSPEC_THREADS environment variable.
inline int max_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("LEVYSPEC_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return static_cast<int>(hw);
}

// Runs body(i) for i in [0, n). Each index must touch only its own
// output slot; results are then identical for any thread count.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    int workers = max_threads();
    if (workers <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace levyspec
