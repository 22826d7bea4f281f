#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ceslab/common.hpp"
#include "ceslab/gamma.hpp"

namespace ceslab {

struct quad_rule {
    std::vector<double> x, w; // nodes and weights
};

// Gauss-Legendre on [-1,1] by Newton iteration on P_n.
inline quad_rule gauss_legendre(int n) {
    quad_rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

namespace detail {

// Symmetric tridiagonal QL with implicit shifts; d = diagonal, e = off-diagonal
// (e[0..n-2]). On return d holds eigenvalues and z[i] the first component of
// the i-th normalized eigenvector.
inline void tql2_first_components(std::vector<double>& d, std::vector<double>& e,
                                  std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    z.assign(n, 0.0);
    if (n == 0) return;
    z[0] = 1.0;
    std::vector<std::vector<double>> zz(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) zz[i][i] = 1.0;
    e.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw numeric_error("tql2: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i], b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = zz[k][i + 1];
                        zz[k][i + 1] = s * zz[k][i] + c * f;
                        zz[k][i] = c * zz[k][i] - s * f;
                    }
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    for (int i = 0; i < n; ++i) z[i] = zz[0][i];
}

} // namespace detail

// Gauss-Jacobi on [-1,1] for weight (1+x)^beta (alpha = 0), beta > -1,
// via Golub-Welsch.
inline quad_rule gauss_jacobi01(int n, double beta) {
    const double a = 0.0, b = beta;
    std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        if (k == 0)
            d[k] = (b - a) / (a + b + 2.0);
        else
            d[k] = (b * b - a * a) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
        double den = s * s * (s + 1.0) * (s - 1.0);
        if (k == 1) { // k + a + b may vanish for k=1 only when a+b = -1; fine here
            num = 4.0 * 1.0 * (1.0 + a) * (1.0 + b) * (1.0 + a + b);
            den = (2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b) * (1.0 + a + b);
        }
        e[k - 1] = std::sqrt(num / den);
    }
    std::vector<double> z;
    detail::tql2_first_components(d, e, z);
    // mu0 = int_{-1}^{1} (1+x)^b dx = 2^{b+1}/(b+1); general: 2^{a+b+1} B(a+1,b+1)
    const double mu0 =
        std::pow(2.0, a + b + 1.0) *
        std::real(cgamma(cd(a + 1.0)) * cgamma(cd(b + 1.0)) / cgamma(cd(a + b + 2.0)));
    quad_rule r;
    // eigenvalues come out unordered; sort nodes with their weights
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] < d[j]; });
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = d[idx[i]];
        r.w[i] = mu0 * z[idx[i]] * z[idx[i]];
    }
    return r;
}

template <class F>
cd integrate_panel(F&& f, double a, double b, const quad_rule& rule) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cd s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        s += rule.w[i] * f(mid + half * rule.x[i]);
    return half * s;
}

// --- Laplace transform quadrature ------------------------------------------

struct laplace_scheme {
    // exponent of an integrable endpoint singularity x^sigma at 0, in
    // (-1/2, 0); unset means the integrand is bounded at 0
    std::optional<double> endpoint_sigma;
    std::vector<double> breakpoints; // known kinks/jumps of f; panels align here
    double base_len = 1.0;           // forward panel length scale
    int nodes = 24;
    int dyadic_levels = 40;  // panels refining toward 0
    int max_forward = 4000;  // forward panel cap
    double tol = 1e-13;      // relative tail cut
};

// (1/sqrt(2pi)) * int_0^inf f(x) e^{-sx} dx, Re s > 0. Panels: dyadic toward
// the origin (Gauss-Jacobi innermost when a power singularity is declared),
// then fixed-length forward panels sized against the oscillation of e^{-sx}.
template <class F>
cd laplace_quad(F&& f, cd s, const laplace_scheme& sch = {}) {
    if (s.real() <= 0.0) throw std::domain_error("laplace_quad: Re s must be positive");
    static thread_local quad_rule gl = gauss_legendre(24);
    if (static_cast<int>(gl.x.size()) != sch.nodes) gl = gauss_legendre(sch.nodes);

    auto g = [&](double x) { return f(x) * std::exp(-s * x); };

    const double L = sch.base_len;
    cd total = 0.0;
    // innermost panel [0, L 2^-K]
    const double x0 = L * std::ldexp(1.0, -sch.dyadic_levels);
    if (sch.endpoint_sigma) {
        const double sg = *sch.endpoint_sigma;
        if (sg <= -0.5 || sg >= 0.0)
            throw std::domain_error("laplace_quad: endpoint exponent must be in (-1/2, 0)");
        // int_0^{x0} x^sg h(x) e^{-sx} dx with h = f(x) x^{-sg} smooth;
        // map x = x0 (1+u)/2, weight (1+u)^sg
        static thread_local double cached_sigma = 2.0;
        static thread_local quad_rule gj;
        if (cached_sigma != sg) {
            gj = gauss_jacobi01(sch.nodes, sg);
            cached_sigma = sg;
        }
        cd acc = 0.0;
        for (std::size_t i = 0; i < gj.x.size(); ++i) {
            const double x = x0 * 0.5 * (1.0 + gj.x[i]);
            acc += gj.w[i] * f(x) * std::pow(x, -sg) * std::exp(-s * x);
        }
        total += acc * std::pow(x0 * 0.5, sg + 1.0);
    } else {
        total += integrate_panel(g, 0.0, x0, gl);
    }
    // dyadic panels up to L
    for (int k = sch.dyadic_levels - 1; k >= 0; --k) {
        double a = L * std::ldexp(1.0, -(k + 1));
        double b = L * std::ldexp(1.0, -k);
        for (double bp : sch.breakpoints)
            if (bp > a && bp < b) {
                total += integrate_panel(g, a, bp, gl);
                a = bp;
            }
        total += integrate_panel(g, a, b, gl);
    }
    // forward panels, length limited by the phase of e^{-i Im(s) x}
    double len = L;
    if (std::abs(s.imag()) > 1.0) len = std::min(len, 3.0 / std::abs(s.imag()));
    double a = L;
    int quiet = 0;
    for (int k = 0; k < sch.max_forward; ++k) {
        double b = a + len;
        for (double bp : sch.breakpoints)
            if (bp > a && bp < b) b = bp;
        const cd piece = integrate_panel(g, a, b, gl);
        total += piece;
        a = b;
        if (std::abs(piece) < sch.tol * std::abs(total) && a * s.real() > 5.0)
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 3) {
            return total / std::sqrt(2.0 * pi);
        }
    }
    throw numeric_error("laplace_quad: forward panel sum did not converge");
}

// int_0^inf f(t) e^{-st} dt without the normalization (resolvent-style).
template <class F>
cd halfline_quad(F&& f, cd s, const laplace_scheme& sch = {}) {
    return laplace_quad(f, s, sch) * std::sqrt(2.0 * pi);
}

} // namespace ceslab
