#pragma once

#include "zzsfem/elasticity.hpp"
#include "zzsfem/mesh.hpp"
#include "zzsfem/types.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace zzsfem {

struct Formulation {
    enum class Kind { FEM, SFEM };
    Kind kind = Kind::SFEM;
    int subcells = 4;

    static Formulation fem() { return {Kind::FEM, 1}; }
    static Formulation sfem(int nc) { return {Kind::SFEM, nc}; }

    bool smoothed() const { return kind == Kind::SFEM; }
    // Constant-stress regions per element: subcells (SFEM) or Gauss points (FEM).
    int regions() const { return smoothed() ? subcells : 4; }
    std::string name() const;

    bool operator==(const Formulation&) const = default;
};

// Traction as a function of position and outward unit normal.
using TractionFunction = std::function<Vec2(const Vec2& x, const Vec2& normal)>;

struct DirichletSpec {
    bool fix_x = false;
    bool fix_y = false;
    // Prescribed value; homogeneous when empty.
    std::function<Vec2(const Vec2& x)> value;
};

struct PointConstraint {
    int node = 0;
    int component = 0; // 0 = x, 1 = y
    double value = 0;
};

struct BoundaryConditions {
    std::map<int, TractionFunction> tractions;
    std::map<int, DirichletSpec> dirichlet;
    std::vector<PointConstraint> point_constraints;

    // Prescribed traction on a Neumann-tagged edge.
    Vec2 traction(const BoundaryTag& tag, const Vec2& x, const Vec2& normal) const;
};

// Smoothed strain-displacement matrix of a cell: one-point (midpoint)
// boundary integration of N_I n over the cell edges divided by the area.
// Shape functions at the midpoints are found by inverting the bilinear map.
StrainMatrix smoothed_strain_matrix(const quad::Corners& element, const SmoothingCell& cell);

ElementMatrix element_stiffness(const quad::Corners& element, const Formulation& formulation, const Mat3& d);

// Outward unit normal of an element edge (straight segment).
Vec2 edge_normal(const Mesh& mesh, const BoundaryEdge& edge);

class DiscreteSolution {
public:
    DiscreteSolution(std::shared_ptr<const Mesh> mesh, Material material, Formulation formulation,
                     std::shared_ptr<const BoundaryConditions> bcs, Eigen::VectorXd displacements);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    const Material& material() const { return material_; }
    const Formulation& formulation() const { return formulation_; }
    const BoundaryConditions& boundary_conditions() const { return *bcs_; }
    const Eigen::VectorXd& displacements() const { return u_; }
    const Mat3& elasticity() const { return d_; }
    int num_dofs() const { return static_cast<int>(u_.size()); }

    ElementVector element_dofs(int element) const;

    // Subcells of an element (SFEM only).
    const std::vector<SmoothingCell>& cells(int element) const { return cells_.at(element); }

    // Constant stress of a subcell (SFEM) or stress at Gauss point `region`
    // of the 2x2 rule (FEM).
    Stress raw_stress(int element, int region) const;

    // Raw stress at a parent point: owning subcell's constant for SFEM,
    // D B(xi) q for FEM.
    Stress stress_at(int element, const Vec2& parent) const;
    Vec2 displacement_at(int element, const Vec2& parent) const;

    // Subcell index containing a parent point.
    int owning_cell(const Vec2& parent) const;

    // Diagnostics filled by assemble_and_solve.
    double residual_norm = 0;
    double load_norm = 0;

private:
    std::shared_ptr<const Mesh> mesh_;
    Material material_;
    Formulation formulation_;
    std::shared_ptr<const BoundaryConditions> bcs_;
    Eigen::VectorXd u_;
    Mat3 d_;
    std::vector<std::vector<SmoothingCell>> cells_;
    std::vector<std::vector<StrainMatrix>> cell_b_;
};

Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh, const Material& material,
                                               const Formulation& formulation);
Eigen::VectorXd assemble_loads(const Mesh& mesh, const BoundaryConditions& bcs);

// Assembles K and f, eliminates constrained dofs and solves with a sparse
// Cholesky factorisation. Throws NumericalError when the constraints leave a
// rigid-body mode free or the factorisation fails.
DiscreteSolution assemble_and_solve(std::shared_ptr<const Mesh> mesh, const Material& material,
                                    const Formulation& formulation, std::shared_ptr<const BoundaryConditions> bcs);

// Nodal interpolant of a given displacement field wrapped as a solution.
DiscreteSolution interpolate_solution(std::shared_ptr<const Mesh> mesh, const Material& material,
                                      const Formulation& formulation, std::shared_ptr<const BoundaryConditions> bcs,
                                      const std::function<Vec2(const Vec2&)>& field);

} // namespace zzsfem
