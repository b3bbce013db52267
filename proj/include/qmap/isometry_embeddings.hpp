#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qmap/qmap_geometry.hpp"

namespace qmap {

// Element of Sp(R^{2n+2}) in the coordinate order (z^0, z^1..z^n, w_0, w_1..w_n).
struct SymplecticAut {
    Mat M;
};

// Point of the cone {w = dF/dz}.
struct ConePoint {
    CVec z;
    CVec w;
};

// J = [[0, 1], [-1, 0]], the matrix of sum dz^I ^ dw_I.
Mat standard_symplectic(int n);

SymplecticAut phi_translation(const CubicForm& h, const Vec& v);
SymplecticAut phi_scaling(double lambda, int n);
// A must preserve h; checked on sampled vectors with tolerance 1e-10.
SymplecticAut phi_linear(const CubicForm& h, const Mat& A);

double symplectic_residual(const SymplecticAut& g);

ConePoint cone_point(const RMapGeometry& rmap, const CVec& z);
double cone_preservation(const RMapGeometry& rmap, const SymplecticAut& g, const std::vector<ConePoint>& pts);

// Action on the canonical chart: X by the fractional linear map of the z-block,
// (zeta, -zetat) by M, rho and phit fixed.
Vec act_on_chart(const SymplecticAut& g, const Vec& chart, int n);

// One-parameter subgroup t -> Phi_t acting on the canonical chart.
struct Generator {
    std::string name;
    std::function<Vec(const Vec&, double)> flow;
};

// Heisenberg translations, the phit-shift and the dilation of the fiber.
std::vector<Generator> fiber_generators(int n);
// Fiber generators plus translations of Re X, the lambda-scaling and the
// rotations of (y_i, y_j) for the series cubic.
std::vector<Generator> series_automorphism_generators(int n);

// d/dt Phi_t(chart) at t = 0, central differences.
Vec generator_vector(const Generator& g, const Vec& chart);

// max |J^T g(Phi(c)) J - g(c)| for Phi = flow at parameter t, J by central
// differences with step `step`.
double isometry_residual(const QMapGeometry& q, const Generator& g, const Vec& chart, double t = 0.3,
                         double step = 1e-4);

struct OrbitReport {
    int rank = 0;
    int expected = 0;
    bool deficient = false;  // rank < expected
    std::vector<double> singular_values;
};

// Numerical rank of the generator vectors at p; singular values below
// 1e-8 sigma_max count as zero.
OrbitReport orbit_dimension(const QMapGeometry& q, const QKPoint& p, const std::vector<Generator>& gens,
                            int expected);

}  // namespace qmap
