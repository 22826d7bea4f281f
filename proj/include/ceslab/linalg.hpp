#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ceslab/common.hpp"

namespace ceslab {

// column-major dense complex matrix, minimal surface
struct cmatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<cd> a;
    cmatrix() = default;
    cmatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, cd(0.0)) {}
    cd& operator()(std::size_t i, std::size_t j) { return a[j * rows + i]; }
    cd operator()(std::size_t i, std::size_t j) const { return a[j * rows + i]; }
    cd* col(std::size_t j) { return a.data() + j * rows; }
    const cd* col(std::size_t j) const { return a.data() + j * rows; }
};

inline cd dotc(const cd* x, const cd* y, std::size_t n) {
    cd s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline double norm2(const cd* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += abs2(x[i]);
    return std::sqrt(s);
}

inline double vec_norm(const std::vector<cd>& x) { return norm2(x.data(), x.size()); }

// Modified Gram-Schmidt with re-orthogonalization. Columns whose residual
// drops below tol times their original norm are dropped; `kept` records the
// surviving input indices.
inline cmatrix mgs_orthonormalize(const cmatrix& V, double tol, std::vector<std::size_t>* kept = nullptr) {
    const std::size_t n = V.rows;
    std::vector<std::vector<cd>> q;
    if (kept) kept->clear();
    std::vector<cd> v(n);
    for (std::size_t j = 0; j < V.cols; ++j) {
        std::copy(V.col(j), V.col(j) + n, v.begin());
        const double n0 = norm2(v.data(), n);
        if (n0 == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qi : q) {
                const cd c = dotc(qi.data(), v.data(), n);
                for (std::size_t i = 0; i < n; ++i) v[i] -= c * qi[i];
            }
        const double n1 = norm2(v.data(), n);
        if (n1 > tol * n0) {
            for (std::size_t i = 0; i < n; ++i) v[i] /= n1;
            q.push_back(v);
            if (kept) kept->push_back(j);
        }
    }
    cmatrix Q(n, q.size());
    for (std::size_t j = 0; j < q.size(); ++j)
        std::copy(q[j].begin(), q[j].end(), Q.col(j));
    return Q;
}

// Singular values of a dense complex matrix by one-sided Jacobi on columns.
// Intended for the small Gram/angle problems here (dims <= a few hundred).
inline std::vector<double> singular_values(cmatrix A) {
    const std::size_t m = A.rows, n = A.cols;
    if (n == 0) return {};
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                cd apq = dotc(A.col(p), A.col(q), m);
                double app = norm2(A.col(p), m);
                double aqq = norm2(A.col(q), m);
                app *= app;
                aqq *= aqq;
                off = std::max(off, std::abs(apq));
                diag = std::max(diag, std::max(app, aqq));
                if (std::abs(apq) < 1e-300) continue;
                // 2x2 hermitian eigenproblem [[app, apq],[conj(apq), aqq]]
                const double tau = (aqq - app) / (2.0 * std::abs(apq));
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cd phase = apq / std::abs(apq);
                cd* cp = A.col(p);
                cd* cq = A.col(q);
                for (std::size_t i = 0; i < m; ++i) {
                    const cd xp = cp[i], xq = cq[i];
                    cp[i] = c * xp - s * std::conj(phase) * xq;
                    cq[i] = s * phase * xp + c * xq;
                }
            }
        if (off <= 1e-15 * std::sqrt(diag == 0.0 ? 1.0 : diag) * std::sqrt(diag == 0.0 ? 1.0 : diag))
            break;
    }
    std::vector<double> sv(n);
    for (std::size_t j = 0; j < n; ++j) sv[j] = norm2(A.col(j), m);
    std::sort(sv.rbegin(), sv.rend());
    return sv;
}

// Principal angles between the column spans of two orthonormal blocks.
inline std::vector<double> principal_angles(const cmatrix& Q1, const cmatrix& Q2) {
    if (Q1.rows != Q2.rows) throw std::invalid_argument("principal_angles: row mismatch");
    cmatrix M(Q1.cols, Q2.cols);
    for (std::size_t i = 0; i < Q1.cols; ++i)
        for (std::size_t j = 0; j < Q2.cols; ++j)
            M(i, j) = dotc(Q1.col(i), Q2.col(j), Q1.rows);
    auto sv = singular_values(M);
    const std::size_t k = std::min(Q1.cols, Q2.cols);
    std::vector<double> ang(k);
    for (std::size_t i = 0; i < k; ++i) {
        double s = std::clamp(sv[i], 0.0, 1.0);
        ang[i] = std::acos(s);
    }
    std::sort(ang.begin(), ang.end());
    return ang;
}

} // namespace ceslab
