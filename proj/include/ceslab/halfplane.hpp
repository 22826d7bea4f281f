#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ceslab/common.hpp"
#include "ceslab/gamma.hpp"
#include "ceslab/h2.hpp"
#include "ceslab/operators.hpp"
#include "ceslab/quadrature.hpp"

namespace ceslab {

// w(y) = e^{-2(e^y - 1)}; expm1 keeps the y -> -inf limit (e^2) accurate
inline double weight_w(double y) { return std::exp(-2.0 * std::expm1(y)); }

// function on the right half plane, carried as an evaluator
struct hp_fun {
    std::function<cd(cd)> eval;
    cd operator()(cd s) const { return eval(s); }
};

// --- Cayley unitaries U: H^2(D) -> H^2(C+) and its inverse ------------------
//
// The pair is implemented in the unique mutually-inverse reading:
//   (U g)(s)   = g((s-1)/(s+1)) / (sqrt(pi) (1+s)),  Re s > 0
//   (U^-1 G)(z) = 2 sqrt(pi) G((1+z)/(1-z)) / (1-z), |z| < 1
// Round-trip identity and unitarity are verified by the test suite; the
// composition U^-1 after U reproduces g exactly at interior points.

inline cd unitary_U(const std::function<cd(cd)>& g, cd s) {
    const cd z = (s - 1.0) / (s + 1.0);
    if (std::abs(z) >= 1.0)
        throw std::domain_error("unitary_U: mapped point lies outside the open disk");
    return g(z) / (std::sqrt(pi) * (1.0 + s));
}

inline cd unitary_U(const coeff_fun& g, cd s) {
    return unitary_U([&](cd z) { return eval(g, z); }, s);
}

inline cd unitary_U_inv(const hp_fun& G, cd z) {
    if (std::abs(z + 1.0) < 1e-14) throw std::domain_error("unitary_U_inv: z = -1");
    if (std::abs(z) >= 1.0) throw std::domain_error("unitary_U_inv: |z| < 1 required");
    const cd s = (1.0 + z) / (1.0 - z);
    return 2.0 * std::sqrt(pi) * G(s) / (1.0 - z);
}

// --- boundary-line quadrature on Re s = 0 -----------------------------------

struct boundary_quad_params {
    double inner = 1.0;     // uniform panels cover [-inner, inner]
    int inner_panels = 8;
    double Y = 1.0e7;       // symmetric truncation |Im s| <= Y
    int nodes = 24;
};

struct boundary_quad_result {
    cd value;
    double Y;
};

// int_{-Y}^{Y} F(iy) conj(G(iy)) dy with geometric panels toward the tails.
inline boundary_quad_result hp_boundary_inner(const hp_fun& F, const hp_fun& G,
                                              const boundary_quad_params& p = {}) {
    static thread_local quad_rule gl = gauss_legendre(24);
    if (static_cast<int>(gl.x.size()) != p.nodes) gl = gauss_legendre(p.nodes);
    auto f = [&](double y) {
        const cd s(0.0, y);
        return F(s) * std::conj(G(s));
    };
    cd total = 0.0;
    const double h = 2.0 * p.inner / p.inner_panels;
    for (int k = 0; k < p.inner_panels; ++k)
        total += integrate_panel(f, -p.inner + k * h, -p.inner + (k + 1) * h, gl);
    for (int sgn : {+1, -1}) {
        double a = p.inner;
        while (a < p.Y) {
            const double b = std::min(2.0 * a, p.Y);
            total += sgn > 0 ? integrate_panel(f, a, b, gl) : integrate_panel(f, -b, -a, gl);
            a = b;
        }
    }
    return {total, p.Y};
}

inline boundary_quad_result hp_boundary_norm2(const hp_fun& F,
                                              const boundary_quad_params& p = {}) {
    return hp_boundary_inner(F, F, p);
}

// orthonormal basis of H^2(C+): (1/sqrt(2pi)) (s-1/2)^n / (s+1/2)^{n+1}
inline cd hp_basis(int n, cd s) {
    if (n < 0) throw std::domain_error("hp_basis: n >= 0");
    const cd b = (s - 0.5) / (s + 0.5);
    cd p = 1.0;
    for (int k = 0; k < n; ++k) p *= b;
    return p / ((s + 0.5) * std::sqrt(2.0 * pi));
}

// b(s) = (s - 1/2)/(s + 1/2); inner on the half plane, |b(iy)| = 1
inline cd b_multiplier(cd s) { return (s - 0.5) / (s + 0.5); }

// resolvent of the adjoint semigroup: int_0^inf e^{-t} e^{t/2} e^{-st} dt = 1/(s+1/2)
inline cd resolvent_quad(cd s) {
    return halfline_quad([](double t) { return std::exp(-0.5 * t); }, s);
}

// --- chain test pairs for F = W T^-1 L^-1 U ---------------------------------
//
// Stage closed forms, Re lambda > 0, k <= 2:
//   stage 1 (weighted L^2):    y^k e^{lambda y}
//   stage 2 (L^2(0,inf)):      (log x)^k x^{lambda-1/2} e^{-x}
//   stage 3 (H^2(C+)):         (1/sqrt(2pi)) d^k/dlambda^k [(s+1)^{-lambda-1/2} Gamma(lambda+1/2)]
//   stage 4 (H^2(D)):          stage 3 pushed through U^-1; a (1-z)^{lambda-1/2}
//                              polynomial in log(1-z)
// The T map introduces the constant e (from e^{-(x-1)} vs e^{-x}), tracked in
// t_map_constant.

struct chain_test_pair {
    cd lambda;
    unsigned k = 0;
    double t_map_constant = std::exp(1.0);

    std::function<double(double)> stage1_re; // used with complex lambda via stage1()
    cd stage1(double y) const {
        cd v = std::exp(lambda * y);
        for (unsigned j = 0; j < k; ++j) v *= y;
        return v;
    }
    cd stage2(double x) const {
        if (x <= 0.0) return 0.0;
        cd v = std::pow(cd(x), lambda - 0.5) * std::exp(-x);
        for (unsigned j = 0; j < k; ++j) v *= std::log(x);
        return v;
    }
    // Gamma-identity side: derivatives in lambda up to k = 2
    cd stage3(cd s) const {
        const cd g = cgamma(lambda + 0.5);
        const cd psi = cdigamma(lambda + 0.5);
        const cd base = std::pow(s + 1.0, -lambda - 0.5) / std::sqrt(2.0 * pi);
        const cd L = std::log(s + 1.0);
        switch (k) {
            case 0: return base * g;
            case 1: return base * g * (psi - L);
            case 2: {
                const cd psi1 = ctrigamma(lambda + 0.5);
                return base * g * ((psi - L) * (psi - L) + psi1);
            }
            default:
                throw std::domain_error("chain_test_pair: k <= 2 supported in closed form");
        }
    }
    cd stage4(cd z) const {
        const cd g = cgamma(lambda + 0.5);
        const cd psi = cdigamma(lambda + 0.5);
        const cd lg2 = std::log(cd(2.0));
        const cd base = std::pow(2.0, -lambda) * std::pow(1.0 - z, lambda - 0.5);
        const cd L = std::log(1.0 - z); // log(s+1) = log 2 - log(1-z)
        switch (k) {
            case 0: return base * g;
            case 1: return base * g * (psi - lg2 + L);
            case 2: {
                const cd psi1 = ctrigamma(lambda + 0.5);
                return base * g * ((psi - lg2 + L) * (psi - lg2 + L) + psi1);
            }
            default:
                throw std::domain_error("chain_test_pair: k <= 2 supported in closed form");
        }
    }
};

inline chain_test_pair make_chain_pair(cd lambda, unsigned k) {
    if (lambda.real() <= 0.0) throw std::domain_error("chain_test_pair: Re lambda > 0");
    if (k > 2) throw std::domain_error("chain_test_pair: k <= 2");
    chain_test_pair p;
    p.lambda = lambda;
    p.k = k;
    return p;
}

// (T W^-1 stage1)(x) = e * stage2(x): exact pointwise algebra
inline cd chain_T_of_Winv_stage1(const chain_test_pair& p, double x) {
    // W^-1 h = h sqrt(w); (T h)(x) = h(log x)/sqrt(x)
    const double y = std::log(x);
    return p.stage1(y) * std::sqrt(weight_w(y)) / std::sqrt(x);
}

// residual of laplace_quad(stage2) against stage3 at a point
inline double chain_laplace_residual(const chain_test_pair& p, cd s) {
    laplace_scheme sch;
    const double sigma = p.lambda.real() - 0.5;
    if (sigma > -0.5 && sigma < 0.0) sch.endpoint_sigma = sigma;
    const cd q = laplace_quad([&](double x) { return p.stage2(x); }, s, sch);
    return std::abs(q - p.stage3(s));
}

// residual of U^-1(stage3) against stage4 at a point
inline double chain_cayley_residual(const chain_test_pair& p, cd z) {
    hp_fun G{[&](cd s) { return p.stage3(s); }};
    return std::abs(unitary_U_inv(G, z) - p.stage4(z));
}

// --- translation model on the weighted line ---------------------------------

struct line_grid {
    double y0 = 0.0, h = 0.0;
    std::vector<cd> values;
    double y(std::size_t i) const { return y0 + h * static_cast<double>(i); }
};

// (sigma_t h)(y) = e^{-(1 - e^{-t}) e^y} h(y - t); linear interpolation for
// off-grid y - t, exact index shift when t is a grid multiple
inline line_grid sigma_translate(const line_grid& g, double t) {
    if (t < 0.0) throw std::domain_error("sigma_translate: t >= 0");
    if (g.h <= 0.0) throw std::invalid_argument("sigma_translate: uniform grid required");
    line_grid out = g;
    const double shift = t / g.h;
    const double rounded = std::round(shift);
    const bool exact = std::abs(shift - rounded) < 1e-12;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double y = g.y(i);
        cd hval;
        if (exact) {
            const long j = static_cast<long>(i) - static_cast<long>(rounded);
            hval = (j >= 0 && j < static_cast<long>(g.values.size())) ? g.values[j] : cd(0.0);
        } else {
            const double pos = static_cast<double>(i) - shift;
            const long j = static_cast<long>(std::floor(pos));
            const double fr = pos - static_cast<double>(j);
            const cd lo = (j >= 0 && j < static_cast<long>(g.values.size())) ? g.values[j] : cd(0.0);
            const cd hi = (j + 1 >= 0 && j + 1 < static_cast<long>(g.values.size()))
                              ? g.values[j + 1]
                              : cd(0.0);
            hval = (1.0 - fr) * lo + fr * hi;
        }
        out.values[i] = std::exp(-(1.0 - std::exp(-t)) * std::exp(y)) * hval;
    }
    return out;
}

// (S_t f)(y) = f(y - t) on the weighted space, same interpolation rules
inline line_grid shift_translate(const line_grid& g, double t) {
    line_grid out = g;
    const double shift = t / g.h;
    const double rounded = std::round(shift);
    const bool exact = std::abs(shift - rounded) < 1e-12;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        if (exact) {
            const long j = static_cast<long>(i) - static_cast<long>(rounded);
            out.values[i] = (j >= 0 && j < static_cast<long>(g.values.size())) ? g.values[j] : cd(0.0);
        } else {
            const double pos = static_cast<double>(i) - shift;
            const long j = static_cast<long>(std::floor(pos));
            const double fr = pos - static_cast<double>(j);
            const cd lo = (j >= 0 && j < static_cast<long>(g.values.size())) ? g.values[j] : cd(0.0);
            const cd hi = (j + 1 >= 0 && j + 1 < static_cast<long>(g.values.size()))
                              ? g.values[j + 1]
                              : cd(0.0);
            out.values[i] = (1.0 - fr) * lo + fr * hi;
        }
    }
    return out;
}

// W sigma_t W^-1 applied on the grid; equals shift_translate in exact algebra
inline line_grid conjugated_sigma(const line_grid& f, double t) {
    line_grid h = f;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        h.values[i] = f.values[i] * std::sqrt(weight_w(f.y(i)));
    line_grid sh = sigma_translate(h, t);
    for (std::size_t i = 0; i < sh.values.size(); ++i)
        sh.values[i] /= std::sqrt(weight_w(sh.y(i)));
    return sh;
}

// max over sample points of |(f(phi_h(z)) - f(z))/h - (1-z) f'(z)|: the
// semigroup generator (Af)(z) = (1-z) f'(z) against a forward difference
inline double generator_residual(const coeff_fun& f, const std::vector<cd>& pts, double h) {
    const affine_map m = affine_map::flow(h);
    double worst = 0.0;
    coeff_fun df(f.order() > 0 ? f.order() - 1 : 0);
    for (std::size_t n = 1; n < f.order(); ++n)
        df[n - 1] = static_cast<double>(n) * f[n];
    for (cd z : pts) {
        const cd fd = (eval(f, m(z)) - eval(f, z)) / h;
        const cd gen = (1.0 - z) * eval(df, z);
        worst = std::max(worst, std::abs(fd - gen));
    }
    return worst;
}

} // namespace ceslab
