#include "zzsfem/quad.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace zzsfem::quad {

Vec2 inverse_map(const Corners& x, const Vec2& point, double tol, int max_iter)
{
    Vec2 p = Vec2::Zero();
    const double scale = (x.col(2) - x.col(0)).norm() + (x.col(3) - x.col(1)).norm();
    for (int it = 0; it < max_iter; ++it) {
        const Vec2 r = map(x, p) - point;
        if (r.norm() <= tol * scale)
            return p;
        p -= jacobian(x, p).inverse() * r;
    }
    if ((map(x, p) - point).norm() <= tol * scale)
        return p;
    throw NumericalError("bilinear map inversion did not converge for point (" + std::to_string(point.x()) + ", " +
                         std::to_string(point.y()) + ")");
}

StrainMatrix strain_matrix(const Corners& x, const Vec2& parent, double* det_j)
{
    const auto [dn, det] = cartesian_derivatives(x, parent);
    StrainMatrix b = StrainMatrix::Zero();
    for (int i = 0; i < 4; ++i) {
        b(0, 2 * i) = dn(0, i);
        b(1, 2 * i + 1) = dn(1, i);
        b(2, 2 * i) = dn(1, i);
        b(2, 2 * i + 1) = dn(0, i);
    }
    if (det_j)
        *det_j = det;
    return b;
}

namespace {

GaussRule compute_rule(int n)
{
    GaussRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        // recompute derivative at the converged root
        double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        rule.points[n - 1 - i] = z;
        rule.weights[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
    }
    return rule;
}

constexpr int kMaxRule = 64;

} // namespace

const GaussRule& gauss_legendre(int n)
{
    static const std::vector<GaussRule> rules = [] {
        std::vector<GaussRule> r(kMaxRule + 1);
        for (int k = 1; k <= kMaxRule; ++k)
            r[k] = compute_rule(k);
        return r;
    }();
    if (n < 1 || n > kMaxRule)
        throw std::invalid_argument("unsupported Gauss rule order " + std::to_string(n));
    return rules[n];
}

std::vector<QuadraturePoint> tensor_rule(int n, const Vec2& lo, const Vec2& hi)
{
    const GaussRule& g = gauss_legendre(n);
    const Vec2 half = 0.5 * (hi - lo);
    const Vec2 mid = 0.5 * (hi + lo);
    std::vector<QuadraturePoint> out;
    out.reserve(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out.push_back({Vec2(mid.x() + half.x() * g.points[i], mid.y() + half.y() * g.points[j]),
                           g.weights[i] * g.weights[j] * half.x() * half.y()});
    return out;
}

} // namespace zzsfem::quad
