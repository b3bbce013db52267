#pragma once

#include "qmap/qmap_geometry.hpp"
#include "qmap/sampling.hpp"

namespace qmap::test {

inline Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double a : v) out[i++] = a;
    return out;
}

// Point of the series q-map with X = y + i x, x drawn from the series domain.
inline QKPoint random_point(int n, CounterRng& rng) {
    const Vec x = sample_series_domain(n, rng);
    QKPoint p = QKPoint::base(CVec(n));
    for (int i = 0; i < n; ++i) p.X[i] = cd(0.5 * rng.normal(), x[i]);
    p.rho = rng.uniform(0.5, 2.0);
    p.phit = rng.normal();
    p.zeta = 0.5 * rng.normal_vec(n + 1);
    p.zetat = 0.5 * rng.normal_vec(n + 1);
    return p;
}

inline CVec imag_point(const Vec& x) { return CVec(x.cast<cd>() * cd(0.0, 1.0)); }

}  // namespace qmap::test
