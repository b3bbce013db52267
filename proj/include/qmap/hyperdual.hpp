#pragma once

#include <cmath>
#include <ostream>

#include <Eigen/Core>

namespace qmap {

// Truncated polynomial a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.
// Seeding e1 along u and e2 along w yields f, D_u f, D_w f and D_u D_w f
// exactly (up to rounding) in one evaluation.
struct HyperDual {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d12 = 0.0;

    constexpr HyperDual() = default;
    constexpr HyperDual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
    constexpr HyperDual(double value, double e1, double e2, double e12)
        : v(value), d1(e1), d2(e2), d12(e12) {}

    HyperDual& operator+=(const HyperDual& o) {
        v += o.v; d1 += o.d1; d2 += o.d2; d12 += o.d12;
        return *this;
    }
    HyperDual& operator-=(const HyperDual& o) {
        v -= o.v; d1 -= o.d1; d2 -= o.d2; d12 -= o.d12;
        return *this;
    }
    HyperDual& operator*=(const HyperDual& o) {
        *this = HyperDual(v * o.v, v * o.d1 + d1 * o.v, v * o.d2 + d2 * o.v,
                          v * o.d12 + d1 * o.d2 + d2 * o.d1 + d12 * o.v);
        return *this;
    }
    HyperDual& operator/=(const HyperDual& o);
};

// Applies a scalar function with value f0, first derivative f1 and second
// derivative f2 at x.v.
inline HyperDual chain(const HyperDual& x, double f0, double f1, double f2) {
    return {f0, f1 * x.d1, f1 * x.d2, f1 * x.d12 + f2 * x.d1 * x.d2};
}

inline HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
inline HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
inline HyperDual operator*(HyperDual a, const HyperDual& b) { return a *= b; }
inline HyperDual operator-(const HyperDual& a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }
inline HyperDual operator+(const HyperDual& a) { return a; }

inline HyperDual reciprocal(const HyperDual& x) {
    const double r = 1.0 / x.v;
    return chain(x, r, -r * r, 2.0 * r * r * r);
}

inline HyperDual& HyperDual::operator/=(const HyperDual& o) { return *this *= reciprocal(o); }
inline HyperDual operator/(HyperDual a, const HyperDual& b) { return a /= b; }

inline bool operator<(const HyperDual& a, const HyperDual& b) { return a.v < b.v; }
inline bool operator>(const HyperDual& a, const HyperDual& b) { return a.v > b.v; }
inline bool operator<=(const HyperDual& a, const HyperDual& b) { return a.v <= b.v; }
inline bool operator>=(const HyperDual& a, const HyperDual& b) { return a.v >= b.v; }
inline bool operator==(const HyperDual& a, const HyperDual& b) {
    return a.v == b.v && a.d1 == b.d1 && a.d2 == b.d2 && a.d12 == b.d12;
}
inline bool operator!=(const HyperDual& a, const HyperDual& b) { return !(a == b); }

inline HyperDual sqrt(const HyperDual& x) {
    const double s = std::sqrt(x.v);
    return chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline HyperDual log(const HyperDual& x) { return chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v)); }
inline HyperDual exp(const HyperDual& x) {
    const double e = std::exp(x.v);
    return chain(x, e, e, e);
}
inline HyperDual sin(const HyperDual& x) {
    return chain(x, std::sin(x.v), std::cos(x.v), -std::sin(x.v));
}
inline HyperDual cos(const HyperDual& x) {
    return chain(x, std::cos(x.v), -std::sin(x.v), -std::cos(x.v));
}
inline HyperDual abs(const HyperDual& x) { return x.v < 0 ? -x : x; }

inline std::ostream& operator<<(std::ostream& os, const HyperDual& x) {
    return os << '(' << x.v << ", " << x.d1 << ", " << x.d2 << ", " << x.d12 << ')';
}

inline double value_of(double x) { return x; }
inline double value_of(const HyperDual& x) { return x.v; }

}  // namespace qmap

namespace Eigen {

template <>
struct NumTraits<qmap::HyperDual> : GenericNumTraits<double> {
    using Real = qmap::HyperDual;
    using NonInteger = qmap::HyperDual;
    using Literal = qmap::HyperDual;
    using Nested = qmap::HyperDual;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 4,
        AddCost = 4,
        MulCost = 16
    };
    static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
    static inline Real dummy_precision() { return Real(1e-12); }
    static inline Real highest() { return Real(std::numeric_limits<double>::max()); }
    static inline Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
    static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

}  // namespace Eigen
