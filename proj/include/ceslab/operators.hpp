#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ceslab/common.hpp"
#include "ceslab/h2.hpp"
#include "ceslab/linalg.hpp"

namespace ceslab {

// ---------------------------------------------------------------------------
// Cesaro operator and adjoint on coefficient truncations
// ---------------------------------------------------------------------------

// (C a)_n = (a_0 + ... + a_n)/(n+1). Lower triangular: the first N outputs
// depend only on the first N inputs, so this is exact on truncations.
inline coeff_fun apply_C(const coeff_fun& f) {
    coeff_fun out(f.order());
    cd run = 0.0;
    for (std::size_t n = 0; n < f.order(); ++n) {
        run += f[n];
        out[n] = run / static_cast<double>(n + 1);
    }
    return out;
}

// (C* a)_n = sum_{k>=n} a_k/(k+1), truncated at the stored order. The defect
// against the infinite sum is the same constant in every entry (the tail of
// a_k/(k+1) beyond N).
inline coeff_fun apply_C_star(const coeff_fun& f) {
    coeff_fun out(f.order());
    cd run = 0.0;
    for (std::size_t n = f.order(); n-- > 0;) {
        run += f[n] / static_cast<double>(n + 1);
        out[n] = run;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Affine self-maps of the disk and composition operators
// ---------------------------------------------------------------------------

// z -> a z + b with |a| + |b| <= 1 (so the closed disk maps into itself)
struct affine_map {
    cd a, b;
    std::optional<double> flow_time; // set when this is phi_t

    affine_map(cd a_, cd b_) : a(a_), b(b_) {
        if (std::abs(a) + std::abs(b) > 1.0 + 1e-12)
            throw std::domain_error("affine_map: |a| + |b| <= 1 required");
    }
    // phi_t(z) = e^{-t} z + 1 - e^{-t}
    static affine_map flow(double t) {
        if (t < 0.0) throw std::domain_error("affine_map::flow: t >= 0");
        const double e = std::exp(-t);
        affine_map m(e, 1.0 - e);
        m.flow_time = t;
        return m;
    }
    cd operator()(cd z) const { return a * z + b; }
};

enum class triangle { lower, upper };

struct tri_matrix {
    triangle orientation;
    std::size_t n = 0;
    std::vector<cd> e; // dense row-major

    tri_matrix(triangle o, std::size_t n_) : orientation(o), n(n_), e(n_ * n_, cd(0.0)) {}
    cd& at(std::size_t i, std::size_t j) { return e[i * n + j]; }
    cd at(std::size_t i, std::size_t j) const { return e[i * n + j]; }
};

// N-section of the Cesaro matrix (lower) or its conjugate transpose (upper)
inline tri_matrix cesaro_matrix(std::size_t N, bool adjoint = false) {
    tri_matrix M(adjoint ? triangle::upper : triangle::lower, N);
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t k = 0; k <= m; ++k) {
            const cd v = 1.0 / static_cast<double>(m + 1);
            if (adjoint)
                M.at(k, m) = v;
            else
                M.at(m, k) = v;
        }
    return M;
}

// Matrix of the composition operator f -> f(az+b) on {z^n}: entry (n,k) is
// the z^n coefficient of (az+b)^k. Columns follow the recurrence
// col_k = a*shift(col_{k-1}) + b*col_{k-1}.
inline tri_matrix comp_matrix(const affine_map& m, std::size_t N) {
    tri_matrix M(triangle::upper, N);
    std::vector<cd> col(N, cd(0.0)), nxt(N, cd(0.0));
    col[0] = 1.0;
    M.at(0, 0) = 1.0;
    for (std::size_t k = 1; k < N; ++k) {
        nxt.assign(N, cd(0.0));
        for (std::size_t i = 0; i < k; ++i) {
            nxt[i] += m.b * col[i];
            nxt[i + 1] += m.a * col[i];
        }
        col.swap(nxt);
        for (std::size_t i = 0; i <= k; ++i) M.at(i, k) = col[i];
    }
    return M;
}

// f -> f(az+b). Upper-triangular dependence runs forward, so output n only
// needs inputs k >= n; truncation error is controlled by the tail of f.
inline coeff_fun apply_composition(const coeff_fun& f, const affine_map& m) {
    const std::size_t N = f.order();
    const tri_matrix M = comp_matrix(m, N);
    coeff_fun out(N);
    for (std::size_t i = 0; i < N; ++i) {
        cd s = 0.0;
        for (std::size_t k = i; k < N; ++k) s += M.at(i, k) * f[k];
        out[i] = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weighted composition (L_Phi f)(z) = (1 - Phi(z))/(1 - z) f(Phi(z))
// ---------------------------------------------------------------------------

// analytic self-maps supported by the weighted composition: affine maps and
// the reciprocal map z -> 1/(2-z)
struct selfmap_desc {
    enum class kind { affine, reciprocal_two_minus } type;
    cd a{1.0}, b{0.0};

    static selfmap_desc affine(const affine_map& m) {
        return {kind::affine, m.a, m.b};
    }
    static selfmap_desc reciprocal_two_minus() {
        return {kind::reciprocal_two_minus, 0.0, 0.0};
    }
    cd operator()(cd z) const {
        return type == kind::affine ? a * z + b : 1.0 / (2.0 - z);
    }
};

// Boundary sampling on the half-offset grid followed by FFT coefficient
// recovery. grid_size must be a power of two; a decay sanity check flags
// aliasing.
inline coeff_fun weighted_comp(const coeff_fun& f, const selfmap_desc& phi,
                               std::size_t grid_size, std::size_t nout) {
    const std::size_t M = grid_size;
    if (M == 0 || (M & (M - 1)) != 0)
        throw std::invalid_argument("weighted_comp: grid size must be a power of two");
    if (nout > M / 2) throw std::invalid_argument("weighted_comp: nout > M/2");
    std::vector<cd> s(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double th = 2.0 * pi * (static_cast<double>(j) + 0.5) / static_cast<double>(M);
        const cd z = std::polar(1.0, th);
        const cd w = phi(z);
        cd weight;
        if (phi.type == selfmap_desc::kind::affine && std::abs(phi.a + phi.b - 1.0) < 1e-14) {
            weight = phi.a; // (1 - az - b)/(1 - z) with a + b = 1 collapses to a
        } else {
            weight = (1.0 - w) / (1.0 - z);
        }
        s[j] = weight * eval(f, w);
    }
    // remove the half-offset twist, then DFT
    fft_pow2(s, -1);
    coeff_fun out(nout);
    double head = 0.0, tailband = 0.0;
    for (std::size_t n = 0; n < M / 2; ++n) {
        const cd c = s[n] / static_cast<double>(M) *
                     std::polar(1.0, -pi * static_cast<double>(n) / static_cast<double>(M));
        if (n < nout) out[n] = c;
        if (n < M / 4)
            head += abs2(c);
        else
            tailband += abs2(c);
    }
    if (tailband > 1e-12 * (head + tailband) && head > 0.0)
        throw numeric_error("weighted_comp: recovered coefficients fail the decay check (aliasing)");
    return out;
}

// ---------------------------------------------------------------------------
// Norm and pseudospectrum diagnostics
// ---------------------------------------------------------------------------

struct linear_op {
    std::function<coeff_fun(const coeff_fun&)> apply;
    std::function<coeff_fun(const coeff_fun&)> apply_adjoint;
};

inline linear_op op_cesaro() {
    return {[](const coeff_fun& f) { return apply_C(f); },
            [](const coeff_fun& f) { return apply_C_star(f); }};
}

inline linear_op op_identity_minus_cesaro() {
    auto sub = [](const coeff_fun& f, const coeff_fun& g) {
        coeff_fun h(f.order());
        for (std::size_t i = 0; i < f.order(); ++i) h[i] = f[i] - g[i];
        return h;
    };
    return {[sub](const coeff_fun& f) { return sub(f, apply_C(f)); },
            [sub](const coeff_fun& f) { return sub(f, apply_C_star(f)); }};
}

inline constexpr std::uint64_t norm_seed = 0x5EED;

// Power iteration on op* . op from a seeded start; returns the square root of
// the limiting Rayleigh quotient. Fixed iteration count keeps the value a
// smooth function of N for the monotonicity checks.
inline double op_norm_estimate(const linear_op& op, std::size_t N, int iters) {
    rng64 gen(norm_seed);
    coeff_fun v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = gen.next_gaussian();
    double nv = v.norm();
    for (auto& x : v.a) x /= nv;
    double rayleigh = 0.0, prev = -1.0;
    int it = 0;
    for (; it < iters; ++it) {
        coeff_fun w = op.apply_adjoint(op.apply(v));
        rayleigh = 0.0;
        for (std::size_t i = 0; i < N; ++i) rayleigh += (std::conj(v[i]) * w[i]).real();
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        for (std::size_t i = 0; i < N; ++i) v[i] = w[i] / nw;
        if (it > 8 && std::abs(rayleigh - prev) <= 1e-14 * rayleigh) { ++it; break; }
        prev = rayleigh;
    }
    if (it >= iters && std::abs(rayleigh - prev) > 1e-9 * std::max(rayleigh, 1.0))
        throw numeric_error("op_norm_estimate: power iteration did not settle");
    return std::sqrt(std::max(0.0, rayleigh));
}

struct smin_result {
    double value = 0.0;
    bool exactly_singular = false;
    int iterations = 0;
};

// Smallest singular value of the N-section of (C - lambda I) by inverse
// iteration on (A^H A)^{-1}. The rank-structured triangle solves in O(N):
//   row i of A x: (1/(i+1)) sum_{j<i} x_j + (1/(i+1) - lambda) x_i.
// lambda on the finite spectrum {1/(n+1)} makes the section exactly singular
// (kernel = the all-ones vector when lambda = 1).
inline smin_result smin_resolvent(cd lambda, std::size_t N, int iters = 200,
                                  std::uint64_t seed = norm_seed) {
    smin_result res;
    std::vector<cd> diag(N);
    for (std::size_t i = 0; i < N; ++i) {
        diag[i] = cd(1.0 / static_cast<double>(i + 1)) - lambda;
        if (std::abs(diag[i]) < 1e-15) {
            res.exactly_singular = true;
            res.value = 0.0;
            return res;
        }
    }
    auto solve_A = [&](const std::vector<cd>& b) {
        std::vector<cd> x(N);
        cd s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            x[i] = (b[i] - s / static_cast<double>(i + 1)) / diag[i];
            s += x[i];
        }
        return x;
    };
    auto solve_AH = [&](const std::vector<cd>& b) {
        std::vector<cd> x(N);
        cd s = 0.0;
        for (std::size_t i = N; i-- > 0;) {
            x[i] = (b[i] - s) / std::conj(diag[i]);
            s += std::conj(cd(1.0 / static_cast<double>(i + 1))) * x[i];
        }
        return x;
    };
    rng64 gen(seed);
    std::vector<cd> v(N);
    for (auto& x : v) x = gen.next_gaussian();
    double nv = norm2(v.data(), N);
    for (auto& x : v) x /= nv;
    double est = 0.0, prev = -1.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<cd> y = solve_AH(solve_A(v));
        const double ny = norm2(y.data(), N);
        if (!std::isfinite(ny) || ny == 0.0)
            throw numeric_error("smin_resolvent: inverse iteration broke down");
        est = 1.0 / std::sqrt(ny);
        for (std::size_t i = 0; i < N; ++i) v[i] = y[i] / ny;
        res.iterations = it + 1;
        if (it > 4 && std::abs(est - prev) <= 1e-12 * est) break;
        prev = est;
    }
    res.value = est;
    return res;
}

// ---------------------------------------------------------------------------
// Identity checks used by the verification suites
// ---------------------------------------------------------------------------

struct deviation_report {
    double max_offdiag = 0.0;
    double max_diag_err = 0.0;
};

// Forms (I-C)(I-C)* densely and reports the deviation from the diagonal
// matrix with entries n/(n+1). Finite rows telescope, so the identity is
// exact at every N up to rounding.
inline deviation_report diag_identity_TTstar(std::size_t N) {
    // T = I - C: row m has -1/(m+1) for k<m and m/(m+1) on the diagonal
    auto T = [](std::size_t m, std::size_t k) {
        const double im = 1.0 / static_cast<double>(m + 1);
        return k == m ? static_cast<double>(m) * im : -im;
    };
    deviation_report rep;
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t n = 0; n <= m; ++n) {
            double s = 0.0;
            for (std::size_t k = 0; k <= n; ++k) s += T(m, k) * T(n, k);
            if (n < m)
                rep.max_offdiag = std::max(rep.max_offdiag, std::abs(s));
            else
                rep.max_diag_err =
                    std::max(rep.max_diag_err,
                             std::abs(s - static_cast<double>(m) / static_cast<double>(m + 1)));
        }
    return rep;
}

// max |[M, C*]| over the leading N/2 block, M = comp matrix of (1-alpha)z+alpha
inline double commutator_check(double alpha, std::size_t N) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::domain_error("commutator_check: alpha in [0,1)");
    const tri_matrix A = comp_matrix(affine_map(1.0 - alpha, alpha), N);
    const tri_matrix B = cesaro_matrix(N, true);
    const std::size_t H = N / 2;
    double worst = 0.0;
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = i; j < H; ++j) {
            cd ab = 0.0, ba = 0.0;
            for (std::size_t k = i; k <= j; ++k) {
                ab += A.at(i, k) * B.at(k, j);
                ba += B.at(i, k) * A.at(k, j);
            }
            worst = std::max(worst, std::abs(ab - ba));
        }
    return worst;
}

// diagonal of (comp_matrix(1-alpha, alpha) - beta I) against
// F(1/n) = (1-alpha)^{n-1} - beta, F(z) = (1-alpha)^{1/z-1} - beta
inline double universal_translate_diag(double alpha, cd beta, std::size_t n_max) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("universal_translate_diag: alpha in (0,1)");
    const tri_matrix M = comp_matrix(affine_map(1.0 - alpha, alpha), n_max);
    double worst = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const cd diag = M.at(n - 1, n - 1) - beta;
        const cd F = std::pow(cd(1.0 - alpha), 1.0 / (1.0 / static_cast<double>(n)) - 1.0) - beta;
        worst = std::max(worst, std::abs(diag - F));
    }
    return worst;
}

// Parlett recurrence for F(T), T upper triangular with separated diagonal.
inline tri_matrix matrix_function_triangular(const tri_matrix& T,
                                             const std::function<cd(cd)>& F) {
    if (T.orientation != triangle::upper)
        throw std::invalid_argument("matrix_function_triangular: upper triangular input expected");
    const std::size_t N = T.n;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j)
            if (std::abs(T.at(i, i) - T.at(j, j)) < 1e-8)
                throw numeric_error("matrix_function_triangular: diagonal separation below 1e-8");
    tri_matrix R(triangle::upper, N);
    for (std::size_t i = 0; i < N; ++i) R.at(i, i) = F(T.at(i, i));
    for (std::size_t d = 1; d < N; ++d)
        for (std::size_t i = 0; i + d < N; ++i) {
            const std::size_t j = i + d;
            cd s = T.at(i, j) * (R.at(j, j) - R.at(i, i));
            for (std::size_t k = i + 1; k < j; ++k)
                s += R.at(i, k) * T.at(k, j) - T.at(i, k) * R.at(k, j);
            R.at(i, j) = s / (T.at(j, j) - T.at(i, i));
        }
    return R;
}

} // namespace ceslab
