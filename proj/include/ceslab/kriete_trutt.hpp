#pragma once

#include <cmath>
#include <vector>

#include "ceslab/common.hpp"
#include "ceslab/gamma.hpp"
#include "ceslab/h2.hpp"
#include "ceslab/operators.hpp"
#include "ceslab/quadrature.hpp"

namespace ceslab {

// point of the Kriete-Trutt parameter disk with its derived exponent
struct kt_point {
    cd w;
    cd nu; // w/(1-w), Re nu > -1/2 for every |w| < 1

    explicit kt_point(cd w_) : w(w_), nu(w_ / (1.0 - w_)) {
        if (std::abs(w) >= 1.0) throw std::domain_error("kt_point: |w| < 1 required");
        if (nu.real() <= -0.5) throw std::domain_error("kt_point: Re(w/(1-w)) > -1/2 violated");
    }
};

// circle gamma_n carrying mu-mass 2^{-n-1}; metadata only, the density of mu
// on each circle is not available for quadrature
struct mu_circle {
    int n;
    double center, radius, mass;
};

inline mu_circle make_mu_circle(int n) {
    if (n < 0) throw std::domain_error("mu_circle: n >= 0");
    return {n, static_cast<double>(n) / (n + 1.0), 1.0 / (n + 1.0), std::ldexp(1.0, -n - 1)};
}

// ---------------------------------------------------------------------------
// The transform (Kf)(w) = <f, q_{conj w}> = sum_n a_n c_n(nu), where c_n(nu)
// are the coefficients of (1-z)^nu. For the Cauchy kernel this telescopes to
// (K k_lambda)(w) = (1 - conj(lambda))^{w/(1-w)}, the conjugated form of the
// printed display (they agree for real lambda, which is all that is used).
// ---------------------------------------------------------------------------

// generic evaluation with a partial-sum stagnation test
inline cd kt_transform(const coeff_fun& f, const kt_point& w) {
    const std::size_t N = f.order();
    cd sum = 0.0, c = 1.0;
    double recent = 0.0, scale = 0.0;
    const std::size_t window = std::max<std::size_t>(8, N / 16);
    for (std::size_t n = 0; n < N; ++n) {
        const cd term = f[n] * c;
        sum += term;
        scale = std::max(scale, std::abs(sum));
        if (n + window >= N) recent += std::abs(term);
        c *= (static_cast<double>(n) - w.nu) / static_cast<double>(n + 1);
    }
    // polynomials (trailing zeros) always stagnate; otherwise require the last
    // window of increments to be negligible against the value scale
    if (recent > 1e-7 * std::max(scale, 1e-30))
        throw numeric_error("kt_transform: partial sums not stagnant (w too close to the circle "
                            "for this truncation)");
    return sum;
}

// exact finite evaluation for a polynomial (uses the true degree)
inline cd kt_of_polynomial(const coeff_fun& f, const kt_point& w) {
    std::size_t d = 0;
    for (std::size_t n = 0; n < f.order(); ++n)
        if (f[n] != cd(0.0)) d = n;
    cd sum = 0.0, c = 1.0;
    for (std::size_t n = 0; n <= d; ++n) {
        sum += f[n] * c;
        c *= (static_cast<double>(n) - w.nu) / static_cast<double>(n + 1);
    }
    return sum;
}

// K(C f) for polynomial f. Beyond deg f the Cesaro image is exactly
// S_d/(n+1) with S_d = sum of the coefficients, so the tail of the pairing
// series collapses to S_d (1/(nu+1) - sum_{n<Nw} c_n/(n+1)); the finite head
// is summed directly. Work length Nw only controls rounding, not truncation.
inline cd kt_of_cesaro_of_polynomial(const coeff_fun& f, const kt_point& w,
                                     std::size_t work_len = 20000) {
    std::size_t d = 0;
    cd S = 0.0;
    for (std::size_t n = 0; n < f.order(); ++n) {
        if (f[n] != cd(0.0)) d = n;
        S += f[n];
    }
    cd head = 0.0, cs_tail = 0.0, c = 1.0, run = 0.0;
    for (std::size_t n = 0; n < work_len; ++n) {
        if (n < f.order()) run += f[n];
        head += (run / static_cast<double>(n + 1)) * c;
        cs_tail += c / static_cast<double>(n + 1);
        c *= (static_cast<double>(n) - w.nu) / static_cast<double>(n + 1);
    }
    (void)d;
    return head + S * (1.0 / (w.nu + 1.0) - cs_tail);
}

// max over the grid of |K(Cf)(w) - (1-w) Kf(w)| for polynomial f
inline double intertwine_residual(const coeff_fun& f, const std::vector<kt_point>& grid) {
    double worst = 0.0;
    for (const kt_point& w : grid) {
        const cd lhs = kt_of_cesaro_of_polynomial(f, w);
        const cd rhs = (1.0 - w.w) * kt_of_polynomial(f, w);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Pullback norm on H^2(mu): ||p||_H = ||p(I-C) 1||_{H^2}. Lower-triangular
// exactness makes the value monotone nondecreasing in N.
// ---------------------------------------------------------------------------

inline double h2mu_norm(const std::vector<cd>& poly, std::size_t N) {
    coeff_fun power(N); // (I-C)^k 1
    power[0] = 1.0;
    coeff_fun acc(N);
    for (std::size_t k = 0; k < poly.size(); ++k) {
        if (k > 0) {
            const coeff_fun Cp = apply_C(power);
            for (std::size_t i = 0; i < N; ++i) power[i] -= Cp[i];
        }
        for (std::size_t i = 0; i < N; ++i) acc[i] += poly[k] * power[i];
    }
    return acc.norm();
}

// ---------------------------------------------------------------------------
// U_alpha(w) = 2^nu / Gamma(nu+1) * int_0^alpha e^{-t} t^nu dt
// ---------------------------------------------------------------------------
//
// After t = alpha u the integral runs over [0,1] with endpoint factor u^nu.
// Dyadic panels refine toward 0; when Re nu < 0 the innermost panel uses
// Gauss-Jacobi with weight u^{Re nu}, leaving the unimodular u^{i Im nu}
// factor to the nodes. Panel count is set so the neglected mass stays below
// tol^, with the exponent 1 + Re nu from the endpoint behavior.

inline cd U_alpha(double alpha, const kt_point& w, int nodes = 20, double tol = 1e-13) {
    if (alpha <= 0.0) throw std::domain_error("U_alpha: alpha > 0");
    const cd nu = w.nu;
    static thread_local quad_rule gl = gauss_legendre(20);
    if (static_cast<int>(gl.x.size()) != nodes) gl = gauss_legendre(nodes);
    auto f = [&](double u) -> cd { return std::pow(cd(u), nu) * std::exp(-alpha * u); };
    // levels: (2^-K)^{1+Re nu} <= tol
    const double p1 = 1.0 + nu.real();
    int K = static_cast<int>(std::ceil(-std::log2(tol) / p1)) + 2;
    K = std::min(K, 400);
    cd total = 0.0;
    const double x0 = std::ldexp(1.0, -K);
    if (nu.real() < 0.0) {
        static thread_local double cached = 2.0;
        static thread_local quad_rule gj;
        if (cached != nu.real()) {
            gj = gauss_jacobi01(nodes, nu.real());
            cached = nu.real();
        }
        // int_0^{x0} u^{Re nu} [u^{i Im nu} e^{-alpha u}] du, u = x0 (1+s)/2
        cd acc = 0.0;
        for (std::size_t i = 0; i < gj.x.size(); ++i) {
            const double u = x0 * 0.5 * (1.0 + gj.x[i]);
            acc += gj.w[i] * std::pow(cd(u), cd(0.0, nu.imag())) * std::exp(-alpha * u);
        }
        total += acc * std::pow(cd(x0 * 0.5), cd(nu.real() + 1.0));
    } else {
        total += integrate_panel(f, 0.0, x0, gl);
    }
    for (int k = K - 1; k >= 0; --k)
        total += integrate_panel(f, std::ldexp(1.0, -(k + 1)), std::ldexp(1.0, -k), gl);
    if (!std::isfinite(total.real()) || !std::isfinite(total.imag()))
        throw numeric_error("U_alpha: quadrature did not converge");
    total *= std::pow(cd(alpha), nu + 1.0); // undo the substitution
    return std::pow(cd(2.0), nu) * total / cgamma(nu + 1.0);
}

// Kummer-type series for the same lower incomplete gamma, used by the test
// suite as the independent route:
//   gammainc(nu+1, a) = a^{nu+1} e^{-a} sum_k a^k / ((nu+1)...(nu+1+k))
inline cd U_alpha_series(double alpha, const kt_point& w) {
    const cd nu = w.nu;
    cd term = 1.0 / (nu + 1.0), sum = term;
    for (int k = 1; k < 100000; ++k) {
        term *= alpha / (nu + 1.0 + static_cast<double>(k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    const cd lower = std::pow(cd(alpha), nu + 1.0) * std::exp(-alpha) * sum;
    return std::pow(cd(2.0), nu) * lower / cgamma(nu + 1.0);
}

// mean square of U_alpha on the circle of the given radius (H^2-norm proxy)
inline double U_alpha_mean_square(double alpha, double radius, std::size_t samples) {
    double s = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        const double th = 2.0 * pi * (static_cast<double>(j) + 0.5) / static_cast<double>(samples);
        const kt_point w(std::polar(radius, th));
        s += abs2(U_alpha_series(alpha, w));
    }
    return s / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// S*-identity: K(S*f - f)(z) = -Kf(1/(2-z)) with the backward shift S*
// ---------------------------------------------------------------------------

inline double sstar_identity(const coeff_fun& f, const std::vector<cd>& z_grid) {
    coeff_fun shifted(f.order());
    for (std::size_t n = 0; n + 1 < f.order(); ++n) shifted[n] = f[n + 1];
    coeff_fun diff(f.order());
    for (std::size_t n = 0; n < f.order(); ++n) diff[n] = shifted[n] - f[n];
    double worst = 0.0;
    for (cd z : z_grid) {
        if (std::abs(z) >= 1.0) throw std::domain_error("sstar_identity: grid point outside disk");
        const cd lhs = kt_of_polynomial(diff, kt_point(z));
        const cd rhs = -kt_of_polynomial(f, kt_point(1.0 / (2.0 - z)));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// g_n(z) = prod_{j<n} (z - j/(j+1)) / (1-z)^n. The printed final factor
// breaks the node pattern (its node would leave the disk); the nodes are read
// as j/(j+1), j = 0..n-1.
// ---------------------------------------------------------------------------

inline cd kt_basis_g(int n, cd z) {
    if (n < 0) throw std::domain_error("kt_basis_g: n >= 0");
    if (std::abs(1.0 - z) < 1e-14) throw std::domain_error("kt_basis_g: z = 1");
    cd num = 1.0;
    for (int j = 0; j < n; ++j)
        num *= (z - static_cast<double>(j) / static_cast<double>(j + 1));
    return num / std::pow(1.0 - z, static_cast<double>(n));
}

} // namespace ceslab
