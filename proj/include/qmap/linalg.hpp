#pragma once

#include <cmath>
#include <complex>
#include <type_traits>
#include <utility>

#include <Eigen/Dense>

#include "qmap/errors.hpp"
#include "qmap/hyperdual.hpp"

namespace qmap {

using cd = std::complex<double>;

template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Mat = MatT<double>;
using Vec = VecT<double>;
using CMat = MatT<cd>;
using CVec = VecT<cd>;

struct SignatureReport {
    int positive = 0;
    int negative = 0;
    int zero = 0;
    double tolerance = 0.0;
};

// Eigenvalues with |lambda| < rel_tol * max|A_ij| count as zero.
SignatureReport signature_of(const Mat& symmetric, double rel_tol = 1e-9);

double max_abs(const Mat& a);
double max_abs(const CMat& a);

// Relative deviation |a - b| / max(1, |b|).
double rel_err(double a, double b);

// Gauss-Jordan inverse with partial pivoting on the leading value. Works for
// double and HyperDual entries; throws `code` when a pivot falls below
// rel_tol times the largest entry.
template <class T>
MatT<T> inverse(const MatT<T>& a, ErrorCode code, double rel_tol = 1e-13) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n) throw Error(ErrorCode::DimensionMismatch, "inverse of non-square matrix");
    MatT<T> m = a;
    MatT<T> inv = MatT<T>::Identity(n, n);
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(value_of(a(i, j))));
    if (scale == 0.0) throw Error(code, "matrix is zero");
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(value_of(m(r, col))) > std::abs(value_of(m(piv, col)))) piv = r;
        if (std::abs(value_of(m(piv, col))) < rel_tol * scale) throw Error(code, "matrix is singular");
        if (piv != col) {
            m.row(piv).swap(m.row(col));
            inv.row(piv).swap(inv.row(col));
        }
        const T p = T(1.0) / m(col, col);
        m.row(col) *= p;
        inv.row(col) *= p;
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const T f = m(r, col);
            if (value_of(f) == 0.0 && !std::is_same_v<T, HyperDual>) continue;
            m.row(r) -= f * m.row(col);
            inv.row(r) -= f * inv.row(col);
        }
    }
    return inv;
}

inline double sqrt_t(double x) { return std::sqrt(x); }
inline HyperDual sqrt_t(const HyperDual& x) { return qmap::sqrt(x); }

// Lower-triangular e with e^T e = g, built from the Cholesky factor of the
// index-reversed matrix.
template <class T>
MatT<T> reversed_cholesky(const MatT<T>& g) {
    const int n = static_cast<int>(g.rows());
    MatT<T> r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = g(n - 1 - i, n - 1 - j);
    MatT<T> l = MatT<T>::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        T s = r(j, j);
        for (int k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
        if (!(value_of(s) > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "metric is not positive definite");
        l(j, j) = sqrt_t(s);
        for (int i = j + 1; i < n; ++i) {
            T t = r(i, j);
            for (int k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
            l(i, j) = t / l(j, j);
        }
    }
    MatT<T> e(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e(i, j) = l(n - 1 - j, n - 1 - i);
    return e;
}

}  // namespace qmap
