#pragma once

#include <cstddef>
#include <vector>

#include "ceslab/common.hpp"

namespace ceslab {

// In-place radix-2 FFT. sign = -1: forward (e^{-2pi i nk/M}), +1: inverse
// without the 1/M factor. Length must be a power of two.
inline void fft_pow2(std::vector<cd>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_pow2: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / static_cast<double>(len);
        const cd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cd u = a[i + k];
                cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// First nout coefficients of the product of two coefficient sequences.
// Direct convolution below the crossover, zero-padded FFT above it
// (pad >= la+lb-1, so no circular wrap touches the result).
inline std::vector<cd> convolve_trunc(const std::vector<cd>& a, const std::vector<cd>& b,
                                      std::size_t nout) {
    const std::size_t la = std::min(a.size(), nout), lb = std::min(b.size(), nout);
    std::vector<cd> out(nout, cd(0.0));
    if (la == 0 || lb == 0) return out;
    constexpr std::size_t crossover = 512;
    if (la < crossover || lb < crossover) {
        for (std::size_t i = 0; i < la; ++i) {
            const cd ai = a[i];
            if (ai == cd(0.0)) continue;
            const std::size_t jmax = std::min(lb, nout - i);
            for (std::size_t j = 0; j < jmax; ++j) out[i + j] += ai * b[j];
        }
        return out;
    }
    const std::size_t m = next_pow2(la + lb - 1);
    std::vector<cd> fa(m, cd(0.0)), fb(m, cd(0.0));
    for (std::size_t i = 0; i < la; ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < lb; ++i) fb[i] = b[i];
    fft_pow2(fa, -1);
    fft_pow2(fb, -1);
    for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
    fft_pow2(fa, +1);
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < nout && i < m; ++i) out[i] = fa[i] * inv;
    return out;
}

} // namespace ceslab
