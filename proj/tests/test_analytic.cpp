#include "zzsfem/analytic.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace zzsfem;

namespace {

constexpr double kPi = std::numbers::pi;

const Material kMaterial{1000.0, 0.3, PlaneState::PlaneStrain};

template <class F>
Strain fd_strain(const F& u, const Vec2& x, double h)
{
    const Vec2 dx = (u(x + Vec2(h, 0)) - u(x - Vec2(h, 0))) / (2 * h);
    const Vec2 dy = (u(x + Vec2(0, h)) - u(x - Vec2(0, h))) / (2 * h);
    return Strain(dx.x(), dy.y(), dx.y() + dy.x());
}

template <class F>
Vec2 fd_divergence(const F& s, const Vec2& x, double h)
{
    const Stress dx = (s(x + Vec2(h, 0)) - s(x - Vec2(h, 0))) / (2 * h);
    const Stress dy = (s(x + Vec2(0, h)) - s(x - Vec2(0, h))) / (2 * h);
    return Vec2(dx(0) + dy(2), dx(2) + dy(1));
}

void check_eigenfield(const EigenField& f, double alpha)
{
    const Mat3 d = elasticity_matrix(kMaterial);
    const auto u = [&](const Vec2& x) { return f.displacement(x); };
    const auto s = [&](const Vec2& x) { return f.stress(x); };
    for (double r : {0.1, 0.4, 1.0})
        for (double phi : {-2.0, -0.9, 0.0, 0.3, 1.7}) {
            const Vec2 x(r * std::cos(phi), r * std::sin(phi));
            const Stress sigma = f.stress(x);
            const Stress from_u = d * fd_strain(u, x, 1e-6 * r);
            CHECK((from_u - sigma).norm() < 1e-4 * sigma.norm());
            const Vec2 div = fd_divergence(s, x, 1e-6 * r);
            CHECK(div.norm() * r < 1e-4 * sigma.norm());
        }
    // Notch faces are traction free.
    for (double sign : {-1.0, 1.0}) {
        const double phi = sign * alpha / 2;
        const Vec2 n(-std::sin(phi), std::cos(phi));
        for (double r : {0.2, 0.7}) {
            const Stress sigma = f.stress(r, phi);
            const Vec2 t(sigma(0) * n.x() + sigma(2) * n.y(), sigma(2) * n.x() + sigma(1) * n.y());
            CHECK(t.norm() < 1e-10 * std::max(1.0, sigma.norm()));
        }
    }
}

} // namespace

TEST_SUITE("analytic")
{
    TEST_CASE("L-shape eigenvalues and Q")
    {
        const double alpha = 1.5 * kPi;
        const double li = solve_singularity_eigenvalue(alpha, Mode::I);
        const double lii = solve_singularity_eigenvalue(alpha, Mode::II);
        CHECK(std::abs(li - 0.544483736782464) < 1e-9);
        CHECK(std::abs(lii - 0.908529189846099) < 1e-9);
        const QConstant q = q_constant(alpha, li, Mode::I);
        CHECK(std::abs(q.value - 0.543075578836737) < 1e-9);
        CHECK_FALSE(q.from_limit);
        for (Mode m : {Mode::I, Mode::II})
            CHECK(std::abs(characteristic(alpha, solve_singularity_eigenvalue(alpha, m), m)) < 1e-12);
    }

    TEST_CASE("mode II Q satisfies its defining relation")
    {
        const double alpha = 1.5 * kPi;
        const double l = solve_singularity_eigenvalue(alpha, Mode::II);
        const double q = q_constant(alpha, l, Mode::II).value;
        CHECK(std::isfinite(q));
        CHECK(std::abs(q * std::sin((l + 1) * alpha / 2) + std::sin((l - 1) * alpha / 2)) < 1e-12);
    }

    TEST_CASE("crack: lambda = 1/2 and Q_I = 1/3 as a limit")
    {
        CHECK(solve_singularity_eigenvalue(2 * kPi, Mode::I) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(solve_singularity_eigenvalue(2 * kPi, Mode::II) == doctest::Approx(0.5).epsilon(1e-12));
        const QConstant q = q_constant(2 * kPi, 0.5, Mode::I);
        CHECK(q.from_limit);
        CHECK(std::abs(q.value - 1.0 / 3.0) < 1e-8);
    }

    TEST_CASE("eigenvalue solver rejects angles outside (pi, 2pi]")
    {
        CHECK_THROWS_AS(solve_singularity_eigenvalue(kPi, Mode::I), std::invalid_argument);
        CHECK_THROWS_AS(solve_singularity_eigenvalue(2 * kPi + 0.1, Mode::I), std::invalid_argument);
    }

    TEST_CASE("primal and dual eigenfields are consistent, in equilibrium and face traction free")
    {
        for (double alpha : {1.5 * kPi, 1.75 * kPi}) {
            const SingularSolution s = SingularSolution::make(alpha, 1.0, 1.0, kMaterial);
            for (Mode m : {Mode::I, Mode::II}) {
                check_eigenfield(s.primal(m), alpha);
                check_eigenfield(s.dual(m), alpha);
            }
        }
    }

    TEST_CASE("mode I displacement is symmetric about the bisector")
    {
        const SingularSolution s = SingularSolution::make(1.5 * kPi, 1.0, 0.0, kMaterial);
        CHECK(std::abs(williams_displacement(s, 0.5, 0.0).y()) < 1e-15);
        const Vec2 up = williams_displacement(s, 0.5, 0.8);
        const Vec2 down = williams_displacement(s, 0.5, -0.8);
        CHECK(up.x() == doctest::Approx(down.x()));
        CHECK(up.y() == doctest::Approx(-down.y()));
    }

    TEST_CASE("Williams fields are linear in the GSIFs and homogeneous in r")
    {
        const SingularSolution s = SingularSolution::make(1.5 * kPi, 1.0, 0.0, kMaterial);
        const SingularSolution s2 = s.with_gsifs(2.0, 0.0);
        const Vec2 u = williams_displacement(s, 0.3, 0.4);
        CHECK((williams_displacement(s2, 0.3, 0.4) - 2 * u).norm() < 1e-15);
        CHECK((williams_stress(s2, 0.3, 0.4) - 2 * williams_stress(s, 0.3, 0.4)).norm() < 1e-13);
        const Vec2 u2 = williams_displacement(s, 0.6, 0.4);
        CHECK((u2 - std::pow(2.0, s.lambda_I) * u).norm() < 1e-14);
        const Stress t = williams_stress(s, 0.3, 0.4);
        CHECK((williams_stress(s, 0.6, 0.4) - std::pow(2.0, s.lambda_I - 1) * t).norm() < 1e-12);

        const SingularSolution both = s.with_gsifs(0.7, -1.3);
        const Stress sum = 0.7 * williams_stress(s.with_gsifs(1, 0), 0.3, 2.0) +
                           -1.3 * williams_stress(s.with_gsifs(0, 1), 0.3, 2.0);
        CHECK((williams_stress(both, 0.3, 2.0) - sum).norm() < 1e-12);
        CHECK_THROWS_AS(williams_stress(s, 0.0, 0.0), std::invalid_argument);
    }

    TEST_CASE("cylinder displacement at the inner wall")
    {
        const CylinderProblem p;
        const double a = p.inner_radius, b = p.outer_radius, c = b / a;
        const double e = p.material.young, nu = p.material.poisson;
        const Vec2 u = cylinder_displacement(p, a, 0);
        CHECK(u.x() == doctest::Approx(p.pressure * (1 + nu) / (e * (c * c - 1)) * (a * (1 - 2 * nu) + b * b / a))
                           .epsilon(1e-13));
        CHECK(std::abs(u.y()) < 1e-20);
        const double r = 0.5 * (a + b);
        const Vec2 diag = cylinder_displacement(p, r * std::sqrt(0.5), r * std::sqrt(0.5));
        CHECK(diag.x() == doctest::Approx(diag.y()).epsilon(1e-14));

        CylinderProblem p2 = p;
        p2.pressure = 7.5;
        const double ratio = cylinder_displacement(p, b, 0).x() / u.x();
        CHECK(cylinder_displacement(p2, b, 0).x() / cylinder_displacement(p2, a, 0).x() ==
              doctest::Approx(ratio).epsilon(1e-14));
        CHECK((cylinder_displacement(p2, 7, 3) - 7.5 * cylinder_displacement(p, 7, 3)).norm() < 1e-18);
    }

    TEST_CASE("cylinder stresses: wall values, invariant sum and radial equilibrium")
    {
        const CylinderProblem p;
        const double a = p.inner_radius, b = p.outer_radius, c = b / a;
        CHECK(cylinder_stress(p, a, 0).sigma_r == doctest::Approx(-p.pressure).epsilon(1e-14));
        CHECK(std::abs(cylinder_stress(p, 0, b).sigma_r) < 1e-14);
        for (double r : {5.0, 8.0, 13.0, 20.0}) {
            const CylinderStress s = cylinder_stress(p, r * std::cos(0.3), r * std::sin(0.3));
            CHECK(s.sigma_r + s.sigma_t == doctest::Approx(2 * p.pressure / (c * c - 1)).epsilon(1e-13));
        }
        for (double r : {6.0, 10.0, 17.0}) {
            const double h = 1e-5 * r;
            const auto sr = [&](double rr) { return cylinder_stress(p, rr, 0).sigma_r; };
            const CylinderStress s = cylinder_stress(p, r, 0);
            const double residual = (sr(r + h) - sr(r - h)) / (2 * h) + (s.sigma_r - s.sigma_t) / r;
            CHECK(std::abs(residual) * r < 1e-6 * std::abs(s.sigma_t));
        }
        // Cartesian components are consistent with the polar ones.
        const double phi = 0.7, r = 9.0;
        const CylinderStress s = cylinder_stress(p, r * std::cos(phi), r * std::sin(phi));
        const double cs = std::cos(phi), sn = std::sin(phi);
        CHECK(s.cartesian(0) == doctest::Approx(s.sigma_r * cs * cs + s.sigma_t * sn * sn));
        CHECK(s.cartesian(2) == doctest::Approx((s.sigma_r - s.sigma_t) * cs * sn));
        CHECK(s.sigma_z == doctest::Approx(p.material.poisson * (s.sigma_r + s.sigma_t)));
    }

    TEST_CASE("cylinder evaluators reject points outside the wall")
    {
        const CylinderProblem p;
        CHECK_THROWS_AS(cylinder_stress(p, 1.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(cylinder_displacement(p, 30.0, 0.0), std::invalid_argument);
    }
}
