#pragma once

// Bilinear quadrilateral reference element: shape functions, isoparametric
// map and Gauss-Legendre rules on [-1,1].

#include "zzsfem/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace zzsfem::quad {

// Parent coordinates of the corners, counter-clockwise from (-1,-1).
inline constexpr std::array<std::array<double, 2>, 4> kCorners{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> shape(Scalar xi, Scalar eta)
{
    Eigen::Matrix<Scalar, 4, 1> n;
    for (int i = 0; i < 4; ++i)
        n(i) = Scalar(0.25) * (1 + Scalar(kCorners[i][0]) * xi) * (1 + Scalar(kCorners[i][1]) * eta);
    return n;
}

// Rows: d/dxi, d/deta.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 4> shape_derivatives(Scalar xi, Scalar eta)
{
    Eigen::Matrix<Scalar, 2, 4> d;
    for (int i = 0; i < 4; ++i) {
        d(0, i) = Scalar(0.25) * Scalar(kCorners[i][0]) * (1 + Scalar(kCorners[i][1]) * eta);
        d(1, i) = Scalar(0.25) * Scalar(kCorners[i][1]) * (1 + Scalar(kCorners[i][0]) * xi);
    }
    return d;
}

// Corner coordinates as columns.
using Corners = Eigen::Matrix<double, 2, 4>;

inline Vec2 map(const Corners& x, const Vec2& parent)
{
    return x * shape(parent.x(), parent.y());
}

// J(i,j) = d x_i / d xi_j
inline Eigen::Matrix2d jacobian(const Corners& x, const Vec2& parent)
{
    return x * shape_derivatives(parent.x(), parent.y()).transpose();
}

// Cartesian gradients of the shape functions (rows d/dx, d/dy) and det J.
inline std::pair<Eigen::Matrix<double, 2, 4>, double> cartesian_derivatives(const Corners& x, const Vec2& parent)
{
    const Eigen::Matrix<double, 2, 4> dn = shape_derivatives(parent.x(), parent.y());
    const Eigen::Matrix2d j = x * dn.transpose();
    const double det = j.determinant();
    return {j.transpose().inverse() * dn, det};
}

// Newton inversion of the bilinear map. Throws NumericalError when it does
// not converge within max_iter iterations.
Vec2 inverse_map(const Corners& x, const Vec2& point, double tol = 1e-12, int max_iter = 20);

// Compatible strain-displacement matrix B (3x8) at a parent point.
StrainMatrix strain_matrix(const Corners& x, const Vec2& parent, double* det_j = nullptr);

struct GaussRule {
    std::vector<double> points;
    std::vector<double> weights;
};

// Gauss-Legendre rule with n points on [-1,1].
const GaussRule& gauss_legendre(int n);

struct QuadraturePoint {
    Vec2 parent;
    double weight; // parent-domain weight, no Jacobian
};

// Tensor-product rule on the parent sub-rectangle [lo, hi].
std::vector<QuadraturePoint> tensor_rule(int n, const Vec2& lo = Vec2(-1, -1), const Vec2& hi = Vec2(1, 1));

} // namespace zzsfem::quad
