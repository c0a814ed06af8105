#include "helpers.hpp"
#include "zzsfem/analytic.hpp"
#include "zzsfem/solver.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace zzsfem;

namespace {

const Material kMaterial{1000.0, 0.25, PlaneState::PlaneStress};

Vec2 linear_field(const Vec2& x)
{
    return 1e-3 * Vec2(1.0 + 2.0 * x.x() + 3.0 * x.y(), -1.0 + 0.5 * x.x() - x.y());
}

const Strain kLinearStrain(2e-3, -1e-3, 3.5e-3);

std::shared_ptr<BoundaryConditions> patch_bcs()
{
    auto bcs = std::make_shared<BoundaryConditions>();
    const Stress s = elasticity_matrix(kMaterial) * kLinearStrain;
    bcs->dirichlet[patch_tags::kFixed.id] = {true, true, linear_field};
    bcs->tractions[patch_tags::kLoaded.id] = [s](const Vec2&, const Vec2& n) {
        return Vec2(s(0) * n.x() + s(2) * n.y(), s(2) * n.x() + s(1) * n.y());
    };
    return bcs;
}

std::shared_ptr<BoundaryConditions> cylinder_bcs(double pressure)
{
    auto bcs = std::make_shared<BoundaryConditions>();
    bcs->tractions[cylinder_tags::kInnerPressure.id] = [pressure](const Vec2&, const Vec2& n) -> Vec2 {
        return -pressure * n;
    };
    bcs->tractions[cylinder_tags::kOuterFree.id] = [](const Vec2&, const Vec2&) { return Vec2(0, 0); };
    bcs->dirichlet[cylinder_tags::kSymmetryX.id] = {false, true, {}};
    bcs->dirichlet[cylinder_tags::kSymmetryY.id] = {true, false, {}};
    return bcs;
}

std::vector<Formulation> all_formulations()
{
    return {Formulation::fem(), Formulation::sfem(1), Formulation::sfem(2), Formulation::sfem(4),
            Formulation::sfem(8)};
}

int zero_eigenvalues(const ElementMatrix& k)
{
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<ElementMatrix>(k).eigenvalues();
    int zeros = 0;
    for (int i = 0; i < 8; ++i)
        if (std::abs(ev(i)) < 1e-10 * ev.cwiseAbs().maxCoeff())
            ++zeros;
    return zeros;
}

} // namespace

TEST_SUITE("solver")
{
    TEST_CASE("smoothed strain matrix of the unit square")
    {
        const quad::Corners x = testing::unit_square();
        const SmoothingCell cell = subdivide_element(x, 1)[0];
        const StrainMatrix b = smoothed_strain_matrix(x, cell);
        Eigen::Matrix<double, 3, 2> node0;
        node0 << -0.5, 0, 0, -0.5, -0.5, -0.5;
        CHECK((b.leftCols<2>() - node0).norm() < 1e-12);
    }

    TEST_CASE("smoothed strain matrix: translations give no strain and scaling halves it")
    {
        const quad::Corners x = testing::distorted_quad();
        for (const SmoothingCell& cell : subdivide_element(x, 8)) {
            const StrainMatrix b = smoothed_strain_matrix(x, cell);
            Eigen::Vector3d sx = Eigen::Vector3d::Zero(), sy = Eigen::Vector3d::Zero();
            for (int i = 0; i < 4; ++i) {
                sx += b.col(2 * i);
                sy += b.col(2 * i + 1);
            }
            CHECK(sx.norm() < 1e-12);
            CHECK(sy.norm() < 1e-12);
        }
        quad::Corners rect;
        rect << 0, 3, 3, 0, 0, 0, 1, 1;
        const quad::Corners big = 2 * rect;
        const auto cells = subdivide_element(rect, 2);
        const auto big_cells = subdivide_element(big, 2);
        for (int c = 0; c < 2; ++c)
            CHECK((smoothed_strain_matrix(big, big_cells[c]) - 0.5 * smoothed_strain_matrix(rect, cells[c])).norm() <
                  1e-12);
    }

    TEST_CASE("element stiffness is symmetric with the rigid-body kernel")
    {
        const quad::Corners x = testing::distorted_quad();
        const Mat3 d = elasticity_matrix(kMaterial);
        ElementVector rot;
        for (int i = 0; i < 4; ++i)
            rot.segment<2>(2 * i) = Vec2(-x(1, i), x(0, i));
        for (const Formulation& f : all_formulations()) {
            CAPTURE(f.name());
            const ElementMatrix k = element_stiffness(x, f, d);
            CHECK((k - k.transpose()).norm() < 1e-12 * k.norm());
            CHECK(Eigen::SelfAdjointEigenSolver<ElementMatrix>(k).eigenvalues().minCoeff() > -1e-10 * k.norm());
            if (f.smoothed() && f.subcells == 1)
                CHECK(zero_eigenvalues(k) >= 3);
            else
                CHECK(zero_eigenvalues(k) == 3);
            CHECK((k * rot).norm() < 1e-10 * k.norm());
        }
    }

    TEST_CASE("many smoothing cells approach the FEM stiffness")
    {
        const quad::Corners x = testing::distorted_quad();
        const Mat3 d = elasticity_matrix(kMaterial);
        ElementMatrix k = ElementMatrix::Zero();
        const int m = 8;
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                quad::Corners sub;
                const double x0 = -1 + 2.0 * i / m, x1 = -1 + 2.0 * (i + 1) / m;
                const double y0 = -1 + 2.0 * j / m, y1 = -1 + 2.0 * (j + 1) / m;
                sub.col(0) = quad::map(x, Vec2(x0, y0));
                sub.col(1) = quad::map(x, Vec2(x1, y0));
                sub.col(2) = quad::map(x, Vec2(x1, y1));
                sub.col(3) = quad::map(x, Vec2(x0, y1));
                const SmoothingCell cell = subdivide_element(sub, 1)[0];
                const StrainMatrix b = smoothed_strain_matrix(x, cell);
                k += b.transpose() * d * b * cell.area;
            }
        const ElementMatrix fem = element_stiffness(x, Formulation::fem(), d);
        CHECK((k - fem).cwiseAbs().maxCoeff() < 0.01 * fem.cwiseAbs().maxCoeff());
    }

    TEST_CASE("patch test: every formulation reproduces a linear field")
    {
        auto mesh = std::make_shared<const Mesh>(build_distorted_square_mesh(4));
        const Stress exact = elasticity_matrix(kMaterial) * kLinearStrain;
        for (const Formulation& f : all_formulations()) {
            CAPTURE(f.name());
            const DiscreteSolution sol = assemble_and_solve(mesh, kMaterial, f, patch_bcs());
            for (int n = 0; n < mesh->num_nodes(); ++n)
                CHECK((sol.displacements().segment<2>(2 * n) - linear_field(mesh->node(n))).norm() < 1e-10);
            for (int e = 0; e < mesh->num_elements(); ++e)
                for (int r = 0; r < f.regions(); ++r)
                    CHECK((sol.raw_stress(e, r) - exact).norm() < 1e-10);
        }
    }

    TEST_CASE("SFEM nc=4 and FEM agree on rectangles under constant strain")
    {
        auto mesh = std::make_shared<const Mesh>(build_distorted_square_mesh(3, 0.0));
        const DiscreteSolution a = assemble_and_solve(mesh, kMaterial, Formulation::fem(), patch_bcs());
        const DiscreteSolution b = assemble_and_solve(mesh, kMaterial, Formulation::sfem(4), patch_bcs());
        CHECK((a.displacements() - b.displacements()).norm() < 1e-12);
    }

    TEST_CASE("zero displacement gives zero stress")
    {
        auto mesh = std::make_shared<const Mesh>(build_distorted_square_mesh(2));
        const DiscreteSolution sol = interpolate_solution(mesh, kMaterial, Formulation::sfem(4), nullptr,
                                                          [](const Vec2&) { return Vec2(0, 0); });
        for (int e = 0; e < mesh->num_elements(); ++e)
            for (int r = 0; r < 4; ++r)
                CHECK(sol.raw_stress(e, r).norm() == 0.0);
    }

    TEST_CASE("global stiffness: symmetric, three rigid modes before constraints")
    {
        const Mesh mesh = build_distorted_square_mesh(3);
        for (const Formulation& f : {Formulation::fem(), Formulation::sfem(4)}) {
            const Eigen::MatrixXd k = Eigen::MatrixXd(assemble_stiffness(mesh, kMaterial, f));
            CHECK((k - k.transpose()).norm() < 1e-12 * k.norm());
            const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues();
            int zeros = 0;
            for (int i = 0; i < ev.size(); ++i) {
                CHECK(ev(i) > -1e-10 * ev.maxCoeff());
                if (std::abs(ev(i)) < 1e-10 * ev.maxCoeff())
                    ++zeros;
            }
            CHECK(zeros == 3);
        }
    }

    TEST_CASE("cylinder: work balance, coarse energy and inner-wall stress")
    {
        const CylinderProblem p;
        auto bcs = cylinder_bcs(p.pressure);
        auto mesh1 = std::make_shared<const Mesh>(build_cylinder_mesh(p.inner_radius, p.outer_radius, 1));
        const DiscreteSolution sol = assemble_and_solve(mesh1, p.material, Formulation::sfem(4), bcs);
        const Eigen::VectorXd f = assemble_loads(*mesh1, *bcs);
        const Eigen::SparseMatrix<double> k = assemble_stiffness(*mesh1, p.material, Formulation::sfem(4));
        const double utku = sol.displacements().dot(k * sol.displacements());
        const double utf = sol.displacements().dot(f);
        CHECK(std::abs(utku - utf) < 1e-9 * std::abs(utf));
        CHECK(sol.residual_norm < 1e-9 * sol.load_norm);

        // Exact external work of the pressure on the inner quarter arc.
        const double ur = cylinder_displacement(p, p.inner_radius, 0).x();
        const double exact_work = p.pressure * ur * std::numbers::pi * p.inner_radius / 2;
        CHECK(std::abs(utf - exact_work) < 0.1 * exact_work);

        // Subcell stresses next to the loaded wall approach -p n under refinement.
        double previous = 2 * p.pressure;
        for (int level = 1; level <= 4; ++level) {
            auto mesh = std::make_shared<const Mesh>(build_cylinder_mesh(p.inner_radius, p.outer_radius, level));
            const DiscreteSolution s = assemble_and_solve(mesh, p.material, Formulation::sfem(4), bcs);
            double worst = 0;
            for (const BoundaryEdge& e : mesh->boundary_edges()) {
                if (!(e.tag == cylinder_tags::kInnerPressure))
                    continue;
                const Vec2 n = edge_normal(*mesh, e);
                for (int r = 0; r < 4; ++r) {
                    const Stress t = s.raw_stress(e.element, r);
                    const double sigma_nn = t(0) * n.x() * n.x() + 2 * t(2) * n.x() * n.y() + t(1) * n.y() * n.y();
                    worst = std::max(worst, std::abs(sigma_nn + p.pressure));
                }
            }
            MESSAGE("level " << level << " worst inner-wall normal stress error " << worst);
            CHECK(worst < previous);
            previous = worst;
        }
    }

    TEST_CASE("unconstrained rigid modes are reported")
    {
        auto mesh = std::make_shared<const Mesh>(build_cylinder_mesh(5, 20, 1));
        auto bcs = cylinder_bcs(1.0);
        bcs->dirichlet.erase(cylinder_tags::kSymmetryY.id);
        bcs->dirichlet[cylinder_tags::kSymmetryY.id] = {false, false, {}};
        CHECK_THROWS_AS(assemble_and_solve(mesh, Material{1, 0.3}, Formulation::sfem(4), bcs), NumericalError);
    }

    TEST_CASE("stress_at picks the subcell containing the parent point")
    {
        auto mesh = std::make_shared<const Mesh>(build_cylinder_mesh(5, 20, 1));
        const DiscreteSolution sol = assemble_and_solve(mesh, Material{3e7, 0.3}, Formulation::sfem(8), cylinder_bcs(1));
        CHECK(sol.owning_cell(Vec2(-0.9, -0.9)) == 0);
        CHECK(sol.owning_cell(Vec2(0.9, 0.9)) == 7);
        CHECK((sol.stress_at(3, Vec2(0.6, 0.5)) - sol.raw_stress(3, sol.owning_cell(Vec2(0.6, 0.5)))).norm() == 0.0);
    }
}
