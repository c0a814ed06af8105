#include "zzsfem/analytic.hpp"

#include <array>
#include <numbers>
#include <string>

namespace zzsfem {

namespace {

constexpr double kPi = std::numbers::pi;

bool stress_vanishes(double alpha, double lambda, Mode mode)
{
    double q = 0;
    try {
        q = q_constant(alpha, lambda, mode).value;
    } catch (const NumericalError&) {
        return false;
    }
    double peak = 0;
    for (int k = 0; k <= 16; ++k) {
        const double phi = -alpha / 2 + alpha * k / 16;
        peak = std::max(peak, angular_stress<double>(mode, lambda, q, phi).cwiseAbs().maxCoeff());
    }
    return peak < 1e-8;
}

double bisect(double alpha, Mode mode, double lo, double hi)
{
    double flo = characteristic(alpha, lo, mode);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double fm = characteristic(alpha, mid, mode);
        if (fm == 0)
            return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    const double flo_abs = std::abs(characteristic(alpha, lo, mode));
    const double fhi_abs = std::abs(characteristic(alpha, hi, mode));
    return flo_abs <= fhi_abs ? lo : hi;
}

} // namespace

double solve_singularity_eigenvalue(double alpha, Mode mode)
{
    if (!(alpha > kPi && alpha <= 2 * kPi + 1e-12))
        throw std::invalid_argument("notch opening angle must lie in (pi, 2pi]");

    constexpr double lo = 0.1;
    constexpr double hi = 1.999;
    constexpr int intervals = 400;
    double prev_x = lo;
    double prev_f = characteristic(alpha, lo, mode);
    for (int k = 1; k <= intervals; ++k) {
        const double x = lo + (hi - lo) * k / intervals;
        const double f = characteristic(alpha, x, mode);
        double root = -1;
        if (prev_f == 0)
            root = prev_x;
        else if ((prev_f < 0) != (f < 0))
            root = bisect(alpha, mode, prev_x, x);
        if (root > 0 && !stress_vanishes(alpha, root, mode))
            return root;
        prev_x = x;
        prev_f = f;
    }
    throw NumericalError("no non-trivial eigenvalue in (0.1, 1.999) for alpha = " + std::to_string(alpha) +
                         (mode == Mode::I ? " (mode I)" : " (mode II)"));
}

QConstant q_constant(double alpha, double lambda, Mode mode)
{
    double num = 0, den = 0;
    const double q = q_ratio<double>(alpha, lambda, mode, &num, &den);
    if (std::abs(den) >= 1e-14)
        return {q, false};
    if (std::abs(num) > 1e-10)
        throw NumericalError("Q constant denominator vanishes at alpha = " + std::to_string(alpha));

    // 0/0: both vanish on the eigenvalue curve. Evaluate along lambda(alpha')
    // for alpha' < alpha in extended precision and extrapolate to alpha.
    if (std::abs(characteristic(alpha, lambda, mode)) > 1e-10)
        throw NumericalError("Q constant is 0/0 and lambda is not an eigenvalue of alpha = " + std::to_string(alpha));
    const auto along_curve = [&](double a) {
        const long double l = solve_singularity_eigenvalue(a, mode);
        return q_ratio<long double>(a, l, mode);
    };
    constexpr double delta = 1e-4;
    const long double q1 = along_curve(alpha - delta);
    const long double q2 = along_curve(alpha - 2 * delta);
    return {static_cast<double>(2 * q1 - q2), true};
}

Vec2 EigenField::displacement(double r, double phi) const
{
    if (!(r > 0))
        throw std::invalid_argument("eigenfield evaluated at r <= 0");
    return amplitude * std::pow(r, lambda) * angular_displacement<double>(mode, lambda, q, phi, mu, kappa);
}

Stress EigenField::stress(double r, double phi) const
{
    if (!(r > 0))
        throw std::invalid_argument("eigenfield evaluated at r <= 0");
    return amplitude * lambda * std::pow(r, lambda - 1) * angular_stress<double>(mode, lambda, q, phi);
}

Vec2 EigenField::displacement(const Vec2& x) const
{
    return displacement(x.norm(), std::atan2(x.y(), x.x()));
}

Stress EigenField::stress(const Vec2& x) const
{
    return stress(x.norm(), std::atan2(x.y(), x.x()));
}

SingularSolution SingularSolution::make(double alpha, double k_I, double k_II, const Material& material)
{
    validate(material);
    SingularSolution s;
    s.alpha = alpha;
    s.lambda_I = solve_singularity_eigenvalue(alpha, Mode::I);
    s.lambda_II = solve_singularity_eigenvalue(alpha, Mode::II);
    s.q_I = q_constant(alpha, s.lambda_I, Mode::I).value;
    s.q_II = q_constant(alpha, s.lambda_II, Mode::II).value;
    s.k_I = k_I;
    s.k_II = k_II;
    s.material = material;
    return s;
}

EigenField SingularSolution::primal(Mode mode) const
{
    const ElasticConstants c = elastic_constants(material);
    return mode == Mode::I ? EigenField{Mode::I, lambda_I, q_I, k_I, c.shear_modulus, c.kolosov}
                           : EigenField{Mode::II, lambda_II, q_II, k_II, c.shear_modulus, c.kolosov};
}

EigenField SingularSolution::dual(Mode mode) const
{
    const ElasticConstants c = elastic_constants(material);
    const double l = -(mode == Mode::I ? lambda_I : lambda_II);
    return EigenField{mode, l, q_constant(alpha, l, mode).value, 1.0, c.shear_modulus, c.kolosov};
}

SingularSolution SingularSolution::with_gsifs(double k1, double k2) const
{
    SingularSolution s = *this;
    s.k_I = k1;
    s.k_II = k2;
    return s;
}

Vec2 williams_displacement(const SingularSolution& s, double r, double phi)
{
    return s.primal(Mode::I).displacement(r, phi) + s.primal(Mode::II).displacement(r, phi);
}

Stress williams_stress(const SingularSolution& s, double r, double phi)
{
    return s.primal(Mode::I).stress(r, phi) + s.primal(Mode::II).stress(r, phi);
}

Vec2 williams_displacement(const SingularSolution& s, const Vec2& x)
{
    return williams_displacement(s, x.norm(), std::atan2(x.y(), x.x()));
}

Stress williams_stress(const SingularSolution& s, const Vec2& x)
{
    return williams_stress(s, x.norm(), std::atan2(x.y(), x.x()));
}

namespace {

double checked_radius(const CylinderProblem& p, double x, double y)
{
    if (!(p.inner_radius > 0 && p.inner_radius < p.outer_radius))
        throw std::invalid_argument("cylinder: inner radius must be smaller than the outer radius");
    const double r = std::hypot(x, y);
    if (r < p.inner_radius * (1 - p.inner_slack) || r > p.outer_radius * (1 + 1e-12))
        throw std::invalid_argument("cylinder: point (" + std::to_string(x) + ", " + std::to_string(y) +
                                    ") lies outside the annulus");
    return r;
}

} // namespace

Vec2 cylinder_displacement(const CylinderProblem& p, double x, double y)
{
    const double r = checked_radius(p, x, y);
    const double nu = p.material.poisson;
    const double c = p.outer_radius / p.inner_radius;
    const double ur = p.pressure * (1 + nu) / (p.material.young * (c * c - 1)) *
                      (r * (1 - 2 * nu) + p.outer_radius * p.outer_radius / r);
    return Vec2(ur * x / r, ur * y / r);
}

CylinderStress cylinder_stress(const CylinderProblem& p, double x, double y)
{
    const double r = checked_radius(p, x, y);
    const double c = p.outer_radius / p.inner_radius;
    const double f = p.pressure / (c * c - 1);
    const double b2r2 = p.outer_radius * p.outer_radius / (r * r);
    CylinderStress s;
    s.sigma_r = f * (1 - b2r2);
    s.sigma_t = f * (1 + b2r2);
    const double cs = x / r;
    const double sn = y / r;
    s.cartesian = Stress(s.sigma_r * cs * cs + s.sigma_t * sn * sn, s.sigma_r * sn * sn + s.sigma_t * cs * cs,
                         (s.sigma_r - s.sigma_t) * sn * cs);
    s.sigma_z = 2 * p.material.poisson * f;
    return s;
}

} // namespace zzsfem
