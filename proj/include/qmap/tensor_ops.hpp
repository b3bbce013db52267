#pragma once

#include "qmap/cubic_form.hpp"
#include "qmap/linalg.hpp"
#include "qmap/tensor.hpp"

namespace qmap {

// Third derivative h_{abc} = 6 H_{abc}.
inline Tensor3<double> third_derivative(const CubicForm& h) {
    Tensor3<double> t = h.tensor();
    for (auto& v : t.data()) v *= 6.0;
    return t;
}

// out(r, j, k) = sum_a M(r, a) T(a, j, k)
template <class S>
Tensor3<S> contract_first(const MatT<S>& m, const Tensor3<S>& t) {
    const int n = t.size();
    Tensor3<S> out(n);
    for (int r = 0; r < n; ++r)
        for (int a = 0; a < n; ++a) {
            const S c = m(r, a);
            if (c == S(0)) continue;
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) out(r, j, k) += c * t(a, j, k);
        }
    return out;
}

// out(i, j, c) = sum_k T(i, j, k) M(k, c)
template <class S>
Tensor3<S> contract_last(const Tensor3<S>& t, const MatT<S>& m) {
    const int n = t.size();
    Tensor3<S> out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const S v = t(i, j, k);
                if (v == S(0)) continue;
                for (int c = 0; c < n; ++c) out(i, j, c) += v * m(k, c);
            }
    return out;
}

// out(p, q, r) = sum T(a, b, c) M(a, p) M(b, q) M(c, r)
template <class S>
Tensor3<S> transform3(const Tensor3<S>& t, const MatT<S>& m) {
    const int n = t.size();
    Tensor3<S> a(n), b(n), c(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r) {
                S s = S(0);
                for (int k = 0; k < n; ++k) s += t(i, j, k) * m(k, r);
                a(i, j, r) = s;
            }
    for (int i = 0; i < n; ++i)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r) {
                S s = S(0);
                for (int j = 0; j < n; ++j) s += a(i, j, r) * m(j, q);
                b(i, q, r) = s;
            }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r) {
                S s = S(0);
                for (int i = 0; i < n; ++i) s += b(i, q, r) * m(i, p);
                c(p, q, r) = s;
            }
    return c;
}

// out(p, q, r, s) = sum T(a, b, c, d) M(a, p) M(b, q) M(c, r) M(d, s)
template <class S>
Tensor4<S> transform4(const Tensor4<S>& t, const MatT<S>& m) {
    const int n = t.size();
    Tensor4<S> cur = t;
    for (int slot = 0; slot < 4; ++slot) {
        Tensor4<S> next(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        int idx[4] = {a, b, c, d};
                        S s = S(0);
                        for (int k = 0; k < n; ++k) {
                            int j[4] = {a, b, c, d};
                            j[slot] = k;
                            s += cur(j[0], j[1], j[2], j[3]) * m(k, idx[slot]);
                        }
                        next(a, b, c, d) = s;
                    }
        cur = std::move(next);
    }
    return cur;
}

// sum T(a, b, c, d) M(a, p) M(b, q) M(c, r) M(d, s) T(p, q, r, s)
template <class S>
S full_contract(const Tensor4<S>& t, const MatT<S>& m) {
    const Tensor4<S> u = transform4(t, m);
    S s = S(0);
    for (std::size_t i = 0; i < t.data().size(); ++i) s += t.data()[i] * u.data()[i];
    return s;
}

}  // namespace qmap
