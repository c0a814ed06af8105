#include "helpers.hpp"
#include "zzsfem/error.hpp"
#include "zzsfem/harness.hpp"

#include <doctest.h>

#include <cmath>

using namespace zzsfem;

namespace {

const Material kMaterial{1000.0, 0.3, PlaneState::PlaneStrain};

std::shared_ptr<const Mesh> unit_element()
{
    const quad::Corners x = testing::unit_square();
    std::vector<Vec2> nodes;
    for (int i = 0; i < 4; ++i)
        nodes.push_back(x.col(i));
    return std::make_shared<const Mesh>(nodes, std::vector<QuadElement>{{0, {0, 1, 2, 3}}},
                                        std::vector<BoundaryEdge>{});
}

RecoveredStressField constant_field(std::shared_ptr<const Mesh> mesh, const Stress& c)
{
    std::vector<PatchFit> fits;
    for (int i = 0; i < mesh->num_nodes(); ++i) {
        PatchFit f;
        f.node = i;
        f.frame.center = mesh->node(i);
        f.coefficients = Eigen::VectorXd::Zero(9);
        f.coefficients(0) = c(0);
        f.coefficients(3) = c(1);
        f.coefficients(6) = c(2);
        fits.push_back(f);
    }
    return RecoveredStressField(mesh, fits, std::nullopt);
}

ElementError element(double estimated, double exact)
{
    ElementError e;
    e.estimated = estimated;
    e.exact = exact;
    return e;
}

} // namespace

TEST_SUITE("error")
{
    TEST_CASE("local effectivity D")
    {
        CHECK(local_effectivity(1.0) == 0);
        CHECK(local_effectivity(2.0) == doctest::Approx(1));
        CHECK(local_effectivity(0.5) == doctest::Approx(-1));
        for (double t : {0.01, 0.3, 0.9, 1.0, 1.7, 12.0, 250.0}) {
            CHECK(local_effectivity(t) * local_effectivity(1 / t) <= 0);
            CHECK(std::abs(local_effectivity(t)) == doctest::Approx(std::abs(local_effectivity(1 / t))).epsilon(1e-12));
        }
    }

    TEST_CASE("effectivity statistics")
    {
        std::vector<ElementError> ones{element(1, 1), element(2, 2), element(0.5, 0.5)};
        const EffectivityStats s1 = effectivity(ones);
        CHECK(s1.theta == doctest::Approx(1));
        CHECK(s1.mean_abs_d == 0);
        CHECK(s1.sigma_d == 0);

        // theta^e = 2 and 0.5: D = 1 and -1.
        std::vector<ElementError> mixed{element(2, 1), element(0.5, 1)};
        const EffectivityStats s2 = effectivity(mixed);
        CHECK(s2.theta == doctest::Approx(std::sqrt(4.25 / 2)));
        CHECK(s2.mean_abs_d == doctest::Approx(1));
        CHECK(s2.sigma_d == doctest::Approx(1)); // population deviation of {1, -1}
        CHECK(mixed[0].d == doctest::Approx(1));
        CHECK(mixed[1].d == doctest::Approx(-1));

        std::vector<ElementError> negligible{element(1, 1), element(1e-3, 1e-20)};
        const EffectivityStats s3 = effectivity(negligible);
        CHECK(s3.excluded == 1);
        CHECK_FALSE(negligible[1].included);
        CHECK(s3.mean_abs_d == 0);

        std::vector<ElementError> zero{element(1, 0)};
        CHECK_THROWS_AS(effectivity(zero), NumericalError);
    }

    TEST_CASE("constant stress mismatch on a unit element")
    {
        const auto mesh = unit_element();
        const DiscreteSolution sol(mesh, kMaterial, Formulation::sfem(4), std::make_shared<BoundaryConditions>(),
                                   Eigen::VectorXd::Zero(8));
        const double delta = 0.7;
        const double expected = delta * std::sqrt(compliance_matrix(kMaterial)(0, 0));
        CHECK(estimated_error_norm(sol, constant_field(mesh, Stress(delta, 0, 0))) ==
              doctest::Approx(expected).epsilon(1e-13));
        CHECK(estimated_error_norm(sol, constant_field(mesh, Stress::Zero())) == 0);
        CHECK(exact_error_norm(sol, [&](const Vec2&) { return Stress(delta, 0, 0); }) ==
              doctest::Approx(expected).epsilon(1e-13));
    }

    TEST_CASE("exact stress equal to the discrete stress gives zero error")
    {
        const StudyConfig c = default_config(Benchmark::Patch);
        const BenchmarkProblem p = make_benchmark(c, 0);
        for (const Formulation& f : {Formulation::fem(), Formulation::sfem(8)}) {
            const DiscreteSolution sol = interpolate_solution(p.mesh, p.material, f, p.bcs, p.exact_displacement);
            CHECK(exact_error_norm(sol, p.exact_stress) < 1e-12 * p.exact_stress(Vec2(0, 0)).norm());
        }
    }

    TEST_CASE("convergence rates")
    {
        const ConvergenceRate r = convergence_rate({100, 400}, {1, 0.5});
        CHECK(r.fitted == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(r.average == doctest::Approx(0.5).epsilon(1e-14));
        REQUIRE(r.pairwise.size() == 1);
        CHECK(convergence_rate({10, 20, 40}, {3, 3, 3}).fitted == 0);

        const ConvergenceRate q = convergence_rate({10, 20, 80}, {1, 0.5, 0.2});
        CHECK(q.pairwise.size() == 2);
        CHECK(q.pairwise[0] == doctest::Approx(1));
        CHECK(q.average == doctest::Approx(0.5 * (1 + std::log(2.5) / std::log(4))));

        CHECK_THROWS_AS(convergence_rate({10}, {1}), std::invalid_argument);
        CHECK_THROWS_AS(convergence_rate({10, 20}, {1, 0}), std::invalid_argument);
        CHECK_THROWS_AS(convergence_rate({20, 20}, {1, 0.5}), std::invalid_argument);
    }

    TEST_CASE("report norms are consistent with element contributions")
    {
        const StudyConfig c = default_config(Benchmark::Cylinder);
        const BenchmarkProblem p = make_benchmark(c, 2);
        const DiscreteSolution sol = assemble_and_solve(p.mesh, p.material, c.formulation, p.bcs);
        const RecoveredStressField field = recover(sol, recovery_config(c, p));
        const ErrorReport r = compute_error_report(sol, field, p.exact_stress);
        double est = 0, ex = 0, rec = 0;
        for (const ElementError& e : r.elements) {
            est += e.estimated * e.estimated;
            ex += e.exact * e.exact;
            rec += e.recovered * e.recovered;
            CHECK(e.theta == doctest::Approx(e.estimated / e.exact).epsilon(1e-14));
        }
        CHECK(r.estimated * r.estimated == doctest::Approx(est).epsilon(1e-12));
        CHECK(r.exact * r.exact == doctest::Approx(ex).epsilon(1e-12));
        CHECK(r.recovered * r.recovered == doctest::Approx(rec).epsilon(1e-12));
        CHECK(r.theta == doctest::Approx(r.estimated / r.exact).epsilon(1e-14));
        CHECK(r.dofs == sol.num_dofs());
        CHECK(exact_error_norm(sol, p.exact_stress, 3) == doctest::Approx(r.elements[3].exact).epsilon(1e-14));

        // Doubling the quadrature order barely changes the norms.
        QuadratureOptions fine;
        fine.regular_order = 8;
        CHECK(exact_error_norm(sol, p.exact_stress, -1, fine) == doctest::Approx(r.exact).epsilon(1e-3));
        CHECK(estimated_error_norm(sol, field, -1, fine) == doctest::Approx(r.estimated).epsilon(1e-3));
    }

    TEST_CASE("theta does not depend on the load level")
    {
        StudyConfig c = default_config(Benchmark::Cylinder);
        const double t1 = run_case(c, 1).errors.theta;
        c.pressure = 25;
        const LevelReport r = run_case(c, 1);
        CHECK(r.errors.theta == doctest::Approx(t1).epsilon(1e-10));
    }

    TEST_CASE("exact error decreases under refinement")
    {
        const StudyConfig c = default_config(Benchmark::Cylinder);
        double previous = INFINITY;
        for (int level = 1; level <= 3; ++level) {
            const double e = run_case(c, level).errors.exact;
            CHECK(e > 0);
            CHECK(e < previous);
            previous = e;
        }
    }

    TEST_CASE("nodal interpolant of the cylinder solution converges at the optimal rate")
    {
        StudyConfig c = default_config(Benchmark::Cylinder);
        std::vector<double> dofs, errs;
        for (int level = 1; level <= 4; ++level) {
            const BenchmarkProblem p = make_benchmark(c, level);
            const DiscreteSolution sol =
                interpolate_solution(p.mesh, p.material, Formulation::fem(), p.bcs, p.exact_displacement);
            dofs.push_back(sol.num_dofs());
            errs.push_back(exact_error_norm(sol, p.exact_stress));
        }
        const ConvergenceRate r = convergence_rate(dofs, errs);
        CHECK(r.fitted > 0.45);
        CHECK(r.fitted < 0.55);
    }
}
