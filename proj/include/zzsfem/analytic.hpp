#pragma once

// Closed-form benchmark solutions: the pressurised thick-wall cylinder and
// the leading Williams eigenfields at a V-notch.

#include "zzsfem/elasticity.hpp"
#include "zzsfem/types.hpp"

#include <cmath>

namespace zzsfem {

enum class Mode { I, II };

// Characteristic function of the notch eigenproblem:
// sin(l a) + l sin a (mode I), sin(l a) - l sin a (mode II).
template <typename Scalar>
Scalar characteristic(Scalar alpha, Scalar lambda, Mode mode)
{
    using std::sin;
    const Scalar s = lambda * sin(alpha);
    return sin(lambda * alpha) + (mode == Mode::I ? s : -s);
}

// Angular part of the displacement, already divided by 2 mu (Psi).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> angular_displacement(Mode mode, Scalar lambda, Scalar q, Scalar phi, Scalar mu,
                                                 Scalar kappa)
{
    using std::cos;
    using std::sin;
    const Scalar a = kappa - q * (lambda + 1);
    const Scalar b = kappa + q * (lambda + 1);
    Eigen::Matrix<Scalar, 2, 1> psi;
    if (mode == Mode::I) {
        psi(0) = a * cos(lambda * phi) - lambda * cos((lambda - 2) * phi);
        psi(1) = b * sin(lambda * phi) + lambda * sin((lambda - 2) * phi);
    } else {
        psi(0) = a * sin(lambda * phi) - lambda * sin((lambda - 2) * phi);
        psi(1) = -b * cos(lambda * phi) - lambda * cos((lambda - 2) * phi);
    }
    return psi / (2 * mu);
}

// Angular part of the stress (Phi), Voigt order xx, yy, xy.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> angular_stress(Mode mode, Scalar lambda, Scalar q, Scalar phi)
{
    using std::cos;
    using std::sin;
    const Scalar ql = q * (lambda + 1);
    const Scalar lm = lambda - 1;
    Eigen::Matrix<Scalar, 3, 1> f;
    if (mode == Mode::I) {
        f(0) = (2 - ql) * cos(lm * phi) - lm * cos((lambda - 3) * phi);
        f(1) = (2 + ql) * cos(lm * phi) + lm * cos((lambda - 3) * phi);
        f(2) = ql * sin(lm * phi) + lm * sin((lambda - 3) * phi);
    } else {
        f(0) = (2 - ql) * sin(lm * phi) - lm * sin((lambda - 3) * phi);
        f(1) = (2 + ql) * sin(lm * phi) + lm * sin((lambda - 3) * phi);
        f(2) = -ql * cos(lm * phi) - lm * cos((lambda - 3) * phi);
    }
    return f;
}

template <typename Scalar>
Scalar q_ratio(Scalar alpha, Scalar lambda, Mode mode, Scalar* numerator = nullptr, Scalar* denominator = nullptr)
{
    using std::cos;
    using std::sin;
    const Scalar h = alpha / 2;
    const Scalar num = mode == Mode::I ? cos((lambda - 1) * h) : sin((lambda - 1) * h);
    const Scalar den = mode == Mode::I ? cos((lambda + 1) * h) : sin((lambda + 1) * h);
    if (numerator)
        *numerator = num;
    if (denominator)
        *denominator = den;
    return -num / den;
}

// Smallest positive non-trivial root in (0.1, 1.999) of the characteristic
// equation for alpha in (pi, 2pi]. Roots whose stress eigenfunction vanishes
// identically (mode II at lambda = 1) are skipped. Throws NumericalError.
double solve_singularity_eigenvalue(double alpha, Mode mode);

struct QConstant {
    double value = 0;
    // True when numerator and denominator both vanish and the value was
    // obtained as the limit along the eigenvalue curve lambda(alpha).
    bool from_limit = false;
};

// Q_I = -cos((l-1)a/2)/cos((l+1)a/2), Q_II = -sin((l-1)a/2)/sin((l+1)a/2).
// A vanishing denominator with a non-vanishing numerator throws
// NumericalError.
QConstant q_constant(double alpha, double lambda, Mode mode);

// One term K r^l Psi(l, phi) / K l r^(l-1) Phi(l, phi) of the expansion,
// with phi measured from the wedge bisector (the +x axis). A negative
// exponent gives the dual (extraction) field.
struct EigenField {
    Mode mode = Mode::I;
    double lambda = 0.5;
    double q = 0;
    double amplitude = 1;
    double mu = 0.5;
    double kappa = 3;

    Vec2 displacement(double r, double phi) const;
    Stress stress(double r, double phi) const;
    Vec2 displacement(const Vec2& x) const;
    Stress stress(const Vec2& x) const;
};

// Leading symmetric and antisymmetric terms at a notch of opening alpha.
struct SingularSolution {
    double alpha = 0;
    double lambda_I = 0;
    double lambda_II = 0;
    double q_I = 0;
    double q_II = 0;
    double k_I = 1;
    double k_II = 0;
    Material material;

    static SingularSolution make(double alpha, double k_I, double k_II, const Material& material);

    EigenField primal(Mode mode) const;
    // Exponent -lambda field of the same mode, unit amplitude.
    EigenField dual(Mode mode) const;
    SingularSolution with_gsifs(double k1, double k2) const;
};

// Both throw std::invalid_argument for r <= 0.
Vec2 williams_displacement(const SingularSolution& s, double r, double phi);
Stress williams_stress(const SingularSolution& s, double r, double phi);

// Cartesian-point versions; the singular vertex is the origin.
Vec2 williams_displacement(const SingularSolution& s, const Vec2& x);
Stress williams_stress(const SingularSolution& s, const Vec2& x);

struct CylinderProblem {
    double inner_radius = 5;
    double outer_radius = 20;
    double pressure = 1;
    Material material{3e7, 0.3, PlaneState::PlaneStrain};
    // Points with r >= inner_radius * (1 - inner_slack) are accepted so that
    // chords of a polygonal inner boundary can be evaluated.
    double inner_slack = 0.05;
};

struct CylinderStress {
    Stress cartesian;
    double sigma_z = 0;
    double sigma_r = 0;
    double sigma_t = 0;
};

// Throw std::invalid_argument for points outside the annulus.
Vec2 cylinder_displacement(const CylinderProblem& p, double x, double y);
CylinderStress cylinder_stress(const CylinderProblem& p, double x, double y);

} // namespace zzsfem
