#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ceslab {

using cd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Thrown when a numerical routine cannot certify its result (quadrature
// non-convergence, stagnation failure, rank collapse, ...).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64: tiny, platform-stable generator. std::mt19937 with
// std::*_distribution is not bit-portable across standard libraries, and the
// reports promise byte-identical reruns.
struct rng64 {
    std::uint64_t state;
    explicit rng64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }
    // standard complex gaussian via Box-Muller (deterministic bit pattern)
    cd next_gaussian() {
        double u = next_double(), v = next_double();
        while (u == 0.0) u = next_double();
        double r = std::sqrt(-2.0 * std::log(u));
        return {r * std::cos(2.0 * pi * v) / std::sqrt(2.0),
                r * std::sin(2.0 * pi * v) / std::sqrt(2.0)};
    }
    // derive an independent stream for (seed, index) pairs
    static rng64 stream(std::uint64_t seed, std::uint64_t index) {
        rng64 g(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
        g.next_u64();
        return g;
    }
};

inline double sqr(double x) { return x * x; }
inline double abs2(cd z) { return z.real() * z.real() + z.imag() * z.imag(); }

} // namespace ceslab
