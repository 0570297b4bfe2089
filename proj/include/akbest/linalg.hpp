#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "akbest/common.hpp"

namespace akbest {

/// Dense complex matrix, row-major.
struct ComplexMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> entries;  // rows * cols

    ComplexMatrix() = default;
    ComplexMatrix(int r, int c) : rows(r), cols(c), entries(static_cast<size_t>(r) * c) {}

    cplx& operator()(int r, int c) { return entries[static_cast<size_t>(r) * cols + c]; }
    cplx operator()(int r, int c) const { return entries[static_cast<size_t>(r) * cols + c]; }

    static ComplexMatrix identity(int n) {
        ComplexMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

struct ComplexVector {
    std::vector<cplx> entries;

    ComplexVector() = default;
    explicit ComplexVector(int n) : entries(static_cast<size_t>(n)) {}
    ComplexVector(std::initializer_list<cplx> init) : entries(init) {}

    int len() const { return static_cast<int>(entries.size()); }
    cplx& operator[](int i) { return entries[static_cast<size_t>(i)]; }
    cplx operator[](int i) const { return entries[static_cast<size_t>(i)]; }
};

inline double frobenius_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (const cplx& v : a.entries) s += std::norm(v);
    return std::sqrt(s);
}

inline double norm2(const ComplexVector& v) {
    double s = 0.0;
    for (const cplx& x : v.entries) s += std::norm(x);
    return std::sqrt(s);
}

inline ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x) {
    if (a.cols != x.len()) throw DimensionError("matvec: shape mismatch");
    ComplexVector y(a.rows);
    for (int i = 0; i < a.rows; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols != b.rows) throw DimensionError("matmul: shape mismatch");
    ComplexMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const cplx aik = a(i, k);
            for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

/// result[i] = sum_j conj(A[j,i]) * v[j]   (i.e. A^H v)
inline ComplexVector hermitian_times_vector(const ComplexMatrix& a, const ComplexVector& v) {
    if (a.rows != v.len()) throw DimensionError("hermitian_times_vector: shape mismatch");
    ComplexVector out(a.cols);
    for (int j = 0; j < a.rows; ++j) {
        const cplx vj = v[j];
        for (int i = 0; i < a.cols; ++i) out[i] += std::conj(a(j, i)) * vj;
    }
    return out;
}

/// Thin QR by Householder reflections: H = Q1 * Rbar with Q1 (Nr x Nt)
/// having orthonormal columns and Rbar (Nt x Nt) upper triangular.
///
/// The diagonal of Rbar is forced real and strictly positive by absorbing
/// phases into the columns of Q1, which pins the decomposition uniquely and
/// keeps downstream tree-search layer ordering deterministic. Entries below
/// the diagonal are written as exact zeros.
///
/// Throws RankDeficientError when any |Rbar[j,j]| <= 1e-10 * ||H||_F; callers
/// treat that as an unusable channel draw and resample.
inline std::pair<ComplexMatrix, ComplexMatrix> qr_thin(const ComplexMatrix& h) {
    const int m = h.rows;
    const int n = h.cols;
    if (m < n) throw DimensionError("qr_thin: needs rows >= cols");

    ComplexMatrix r = h;  // reduced in place
    // Householder vectors, one per column (length m - j), and their 2/|v|^2.
    std::vector<std::vector<cplx>> vs(n);
    std::vector<double> tau(n, 0.0);

    for (int j = 0; j < n; ++j) {
        double normx_sq = 0.0;
        for (int i = j; i < m; ++i) normx_sq += std::norm(r(i, j));
        const double normx = std::sqrt(normx_sq);

        const cplx alpha = r(j, j);
        const double aabs = std::abs(alpha);
        const cplx phase = (aabs > 0.0) ? alpha / aabs : cplx(1.0, 0.0);
        const cplx beta = -phase * normx;

        std::vector<cplx> v(static_cast<size_t>(m - j));
        v[0] = alpha - beta;
        for (int i = j + 1; i < m; ++i) v[static_cast<size_t>(i - j)] = r(i, j);
        double vnorm_sq = 0.0;
        for (const cplx& x : v) vnorm_sq += std::norm(x);

        if (vnorm_sq > 0.0) {
            const double t = 2.0 / vnorm_sq;
            // Apply I - t v v^H to the remaining block.
            for (int c = j; c < n; ++c) {
                cplx w = 0.0;
                for (int i = j; i < m; ++i) w += std::conj(v[static_cast<size_t>(i - j)]) * r(i, c);
                w *= t;
                for (int i = j; i < m; ++i) r(i, c) -= w * v[static_cast<size_t>(i - j)];
            }
            vs[j] = std::move(v);
            tau[j] = t;
        }
        r(j, j) = beta;
        for (int i = j + 1; i < m; ++i) r(i, j) = 0.0;  // true zeros
    }

    const double threshold = 1e-10 * frobenius_norm(h);
    for (int j = 0; j < n; ++j)
        if (std::abs(r(j, j)) <= threshold)
            throw RankDeficientError("qr_thin: rank-deficient matrix");

    // Accumulate Q1 = H_0 H_1 ... H_{n-1} * I(m x n).
    ComplexMatrix q(m, n);
    for (int i = 0; i < n; ++i) q(i, i) = 1.0;
    for (int j = n - 1; j >= 0; --j) {
        if (vs[j].empty()) continue;
        const std::vector<cplx>& v = vs[j];
        for (int c = 0; c < n; ++c) {
            cplx w = 0.0;
            for (int i = j; i < m; ++i) w += std::conj(v[static_cast<size_t>(i - j)]) * q(i, c);
            w *= tau[j];
            for (int i = j; i < m; ++i) q(i, c) -= w * v[static_cast<size_t>(i - j)];
        }
    }

    // Absorb diagonal phases so Rbar's diagonal is real positive.
    for (int j = 0; j < n; ++j) {
        const cplx d = r(j, j);
        const double dabs = std::abs(d);
        const cplx p = d / dabs;
        const cplx pc = std::conj(p);
        for (int c = j; c < n; ++c) r(j, c) *= pc;
        r(j, j) = cplx(dabs, 0.0);
        for (int i = 0; i < m; ++i) q(i, j) *= p;
    }

    ComplexMatrix rbar(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rbar(i, j) = (j >= i) ? r(i, j) : cplx(0.0, 0.0);
    return {std::move(q), std::move(rbar)};
}

/// Solves (H^H H + alpha I) x = H^H y via complex Cholesky.
/// alpha == 0 gives the least-squares / zero-forcing solution and throws
/// SingularError when H^H H is numerically singular; alpha > 0 is always
/// solvable and yields the MMSE filter when alpha is the noise variance.
inline ComplexVector solve_regularized(const ComplexMatrix& h, const ComplexVector& y,
                                       double alpha) {
    if (h.rows != y.len()) throw DimensionError("solve_regularized: shape mismatch");
    if (alpha < 0.0) throw Error("solve_regularized: negative regularizer");
    const int n = h.cols;

    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < h.rows; ++k) s += std::conj(h(k, i)) * h(k, j);
            a(i, j) = s;
        }
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) {
        a(i, i) += alpha;
        max_diag = std::max(max_diag, a(i, i).real());
    }
    ComplexVector b = hermitian_times_vector(h, y);

    // L L^H factorization.
    ComplexMatrix l(n, n);
    const double tol = 1e-13 * std::max(max_diag, 1e-300);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            cplx s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            if (j == i) {
                const double d = s.real();
                if (d <= tol) throw SingularError("solve_regularized: singular normal matrix");
                l(i, i) = std::sqrt(d);
            } else {
                l(i, j) = s / l(j, j).real();
            }
        }
    }

    // Forward then backward substitution.
    ComplexVector w(n);
    for (int i = 0; i < n; ++i) {
        cplx s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * w[k];
        w[i] = s / l(i, i).real();
    }
    ComplexVector x(n);
    for (int i = n - 1; i >= 0; --i) {
        cplx s = w[i];
        for (int k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * x[k];
        x[i] = s / l(i, i).real();
    }
    return x;
}

}  // namespace akbest
