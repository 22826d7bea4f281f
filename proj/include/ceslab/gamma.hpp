#pragma once

#include <cmath>

#include "ceslab/common.hpp"

namespace ceslab {
namespace detail {

// Lanczos approximation, g = 7, 9 coefficients. Good to ~1e-13 relative on
// the strip needed here.
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_p[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

struct lanczos_parts {
    cd A, A1, A2; // series and its first two derivatives
    cd t;         // z + g - 1/2
};

inline lanczos_parts lanczos_eval(cd z) {
    lanczos_parts r;
    r.A = lanczos_p[0];
    r.A1 = 0.0;
    r.A2 = 0.0;
    for (int i = 1; i < 9; ++i) {
        const cd d = z - 1.0 + static_cast<double>(i);
        const cd inv = 1.0 / d;
        r.A += lanczos_p[i] * inv;
        r.A1 -= lanczos_p[i] * inv * inv;
        r.A2 += 2.0 * lanczos_p[i] * inv * inv * inv;
    }
    r.t = z + (lanczos_g - 0.5);
    return r;
}

} // namespace detail

// Gamma(z), principal branch, reflection for Re z < 1/2.
inline cd cgamma(cd z) {
    if (z.real() < 0.5)
        return pi / (std::sin(pi * z) * cgamma(1.0 - z));
    const auto L = detail::lanczos_eval(z);
    return std::sqrt(2.0 * pi) * std::pow(L.t, z - 0.5) * std::exp(-L.t) * L.A;
}

inline cd clgamma(cd z) {
    if (z.real() < 0.5)
        return std::log(pi / std::sin(pi * z)) - clgamma(1.0 - z);
    const auto L = detail::lanczos_eval(z);
    return 0.5 * std::log(2.0 * pi) + (z - 0.5) * std::log(L.t) - L.t + std::log(L.A);
}

// digamma: d/dz log Gamma
inline cd cdigamma(cd z) {
    if (z.real() < 0.5)
        return cdigamma(1.0 - z) - pi / std::tan(pi * z);
    const auto L = detail::lanczos_eval(z);
    return std::log(L.t) + (z - 0.5) / L.t - 1.0 + L.A1 / L.A;
}

// trigamma: second derivative of log Gamma
inline cd ctrigamma(cd z) {
    if (z.real() < 0.5) {
        const cd s = std::sin(pi * z);
        return -ctrigamma(1.0 - z) + pi * pi / (s * s);
    }
    const auto L = detail::lanczos_eval(z);
    const cd q = L.A1 / L.A;
    return 1.0 / L.t + (lanczos_g) / (L.t * L.t) + (L.A2 / L.A - q * q);
}

} // namespace ceslab
