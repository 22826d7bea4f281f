#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ceslab/common.hpp"
#include "ceslab/fft.hpp"

namespace ceslab {

// Truncated Taylor coefficient sequence; the working currency for H^2
// computations. order() is the explicit truncation length, coefficients
// beyond it are unknown (not zero) unless the function is a polynomial.
struct coeff_fun {
    std::vector<cd> a;

    coeff_fun() = default;
    explicit coeff_fun(std::size_t order) : a(order, cd(0.0)) {}
    explicit coeff_fun(std::vector<cd> coeffs) : a(std::move(coeffs)) {}

    std::size_t order() const { return a.size(); }
    cd& operator[](std::size_t i) { return a[i]; }
    cd operator[](std::size_t i) const { return a[i]; }

    double norm() const {
        double s = 0.0;
        for (const cd& c : a) s += abs2(c);
        return std::sqrt(s);
    }
};

// parameters of (1-z)^mu (log(1-z))^j; Re mu > -1/2 is the H^2 membership line
struct power_log_params {
    cd mu;
    unsigned j = 0;
    power_log_params(cd mu_, unsigned j_) : mu(mu_), j(j_) {
        if (mu.real() <= -0.5)
            throw std::domain_error("power_log_params: Re mu must exceed -1/2");
    }
};

inline cd inner_product(const coeff_fun& f, const coeff_fun& g) {
    const std::size_t n = std::min(f.order(), g.order());
    cd s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f[i] * std::conj(g[i]);
    return s;
}

inline coeff_fun add(const coeff_fun& f, const coeff_fun& g) {
    coeff_fun h(std::max(f.order(), g.order()));
    for (std::size_t i = 0; i < f.order(); ++i) h[i] += f[i];
    for (std::size_t i = 0; i < g.order(); ++i) h[i] += g[i];
    return h;
}

inline coeff_fun scale(const coeff_fun& f, cd c) {
    coeff_fun h = f;
    for (auto& x : h.a) x *= c;
    return h;
}

// first nout coefficients of f*g (truncated Cauchy product)
inline coeff_fun mul_trunc(const coeff_fun& f, const coeff_fun& g, std::size_t nout) {
    return coeff_fun(convolve_trunc(f.a, g.a, nout));
}

// (1-z)^mu via c_0 = 1, c_{n+1} = c_n (n - mu)/(n + 1); principal branch.
// Any mu is accepted here; H^2 membership is the caller's concern.
inline coeff_fun power_series(cd mu, std::size_t N) {
    if (N == 0) throw std::invalid_argument("power_series: N >= 1");
    coeff_fun f(N);
    f[0] = 1.0;
    for (std::size_t n = 0; n + 1 < N; ++n)
        f[n + 1] = f[n] * (static_cast<double>(n) - mu) / static_cast<double>(n + 1);
    return f;
}

// log(1-z) = -sum_{n>=1} z^n / n
inline coeff_fun log_series(std::size_t N) {
    coeff_fun f(N);
    for (std::size_t n = 1; n < N; ++n) f[n] = -1.0 / static_cast<double>(n);
    return f;
}

// (1-z)^mu (log(1-z))^j as a truncated product
inline coeff_fun power_log_series(const power_log_params& p, std::size_t N) {
    if (N == 0) throw std::invalid_argument("power_log_series: N >= 1");
    coeff_fun f = power_series(p.mu, N);
    if (p.j == 0) return f;
    const coeff_fun lg = log_series(N);
    for (unsigned k = 0; k < p.j; ++k) f = mul_trunc(f, lg, N);
    return f;
}

inline cd eval(const coeff_fun& f, cd z) {
    cd s = 0.0;
    for (std::size_t i = f.order(); i-- > 0;) s = s * z + f[i];
    return s;
}

// k_lambda(z) = (1 - conj(lambda) z)^{-1}: coefficients conj(lambda)^n
inline coeff_fun cauchy_kernel(cd lambda, std::size_t N) {
    if (std::abs(lambda) >= 1.0)
        throw std::domain_error("cauchy_kernel: |lambda| < 1 required");
    coeff_fun f(N);
    const cd q = std::conj(lambda);
    cd p = 1.0;
    for (std::size_t n = 0; n < N; ++n) {
        f[n] = p;
        p *= q;
    }
    return f;
}

// Upper estimate of the l^2 tail beyond order N for a sequence decaying like
// A n^{-s}: calibrate A from the last stored coefficient, then
// sum_{n>N} n^{-2s} <= N^{1-2s}/(2s-1).
inline double tail_bound(const coeff_fun& f, double decay_exponent) {
    if (decay_exponent <= 0.5)
        throw std::domain_error("tail_bound: decay exponent must exceed 1/2 (tail not summable)");
    const std::size_t N = f.order();
    if (N < 2) throw std::invalid_argument("tail_bound: need at least two coefficients");
    const double last = std::abs(f[N - 1]);
    if (last == 0.0) return 0.0;
    const double A = last * std::pow(static_cast<double>(N - 1), decay_exponent);
    const double s = decay_exponent;
    return A * std::sqrt(std::pow(static_cast<double>(N), 1.0 - 2.0 * s) / (2.0 * s - 1.0));
}

} // namespace ceslab
