#include "zzsfem/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace zzsfem {

std::string Formulation::name() const
{
    return smoothed() ? "SFEM" + std::to_string(subcells) : "FEM";
}

Vec2 BoundaryConditions::traction(const BoundaryTag& tag, const Vec2& x, const Vec2& normal) const
{
    const auto it = tractions.find(tag.id);
    if (it == tractions.end())
        throw std::invalid_argument("no traction function registered for Neumann tag " + std::to_string(tag.id));
    return it->second(x, normal);
}

StrainMatrix smoothed_strain_matrix(const quad::Corners& element, const SmoothingCell& cell)
{
    StrainMatrix b = StrainMatrix::Zero();
    for (const CellEdge& edge : cell.edges) {
        const Vec2 parent = quad::inverse_map(element, edge.midpoint);
        const Eigen::Vector4d n = quad::shape(parent.x(), parent.y());
        const double nx = edge.normal.x() * edge.length;
        const double ny = edge.normal.y() * edge.length;
        for (int i = 0; i < 4; ++i) {
            b(0, 2 * i) += n(i) * nx;
            b(1, 2 * i + 1) += n(i) * ny;
            b(2, 2 * i) += n(i) * ny;
            b(2, 2 * i + 1) += n(i) * nx;
        }
    }
    return b / cell.area;
}

ElementMatrix element_stiffness(const quad::Corners& element, const Formulation& formulation, const Mat3& d)
{
    ElementMatrix k = ElementMatrix::Zero();
    if (formulation.smoothed()) {
        for (const SmoothingCell& cell : subdivide_element(element, formulation.subcells)) {
            const StrainMatrix b = smoothed_strain_matrix(element, cell);
            k.noalias() += b.transpose() * d * b * cell.area;
        }
    } else {
        for (const quad::QuadraturePoint& qp : quad::tensor_rule(2)) {
            double det = 0;
            const StrainMatrix b = quad::strain_matrix(element, qp.parent, &det);
            k.noalias() += b.transpose() * d * b * (qp.weight * det);
        }
    }
    return 0.5 * (k + k.transpose());
}

Vec2 edge_normal(const Mesh& mesh, const BoundaryEdge& edge)
{
    const Vec2 d = mesh.node(edge.nodes[1]) - mesh.node(edge.nodes[0]);
    return Vec2(d.y(), -d.x()).normalized();
}

DiscreteSolution::DiscreteSolution(std::shared_ptr<const Mesh> mesh, Material material, Formulation formulation,
                                   std::shared_ptr<const BoundaryConditions> bcs, Eigen::VectorXd displacements)
    : mesh_(std::move(mesh)), material_(material), formulation_(formulation), bcs_(std::move(bcs)),
      u_(std::move(displacements)), d_(elasticity_matrix(material))
{
    if (u_.size() != mesh_->num_dofs())
        throw std::invalid_argument("solution vector size does not match the mesh");
    if (!bcs_)
        bcs_ = std::make_shared<BoundaryConditions>();
    if (formulation_.smoothed()) {
        cells_.resize(mesh_->num_elements());
        cell_b_.resize(mesh_->num_elements());
        for (int e = 0; e < mesh_->num_elements(); ++e) {
            const quad::Corners x = mesh_->corners(e);
            cells_[e] = subdivide_element(x, formulation_.subcells, e);
            for (const SmoothingCell& c : cells_[e])
                cell_b_[e].push_back(smoothed_strain_matrix(x, c));
        }
    }
}

ElementVector DiscreteSolution::element_dofs(int element) const
{
    ElementVector q;
    const auto& nodes = mesh_->element(element).nodes;
    for (int i = 0; i < 4; ++i) {
        q(2 * i) = u_(2 * nodes[i]);
        q(2 * i + 1) = u_(2 * nodes[i] + 1);
    }
    return q;
}

Stress DiscreteSolution::raw_stress(int element, int region) const
{
    if (formulation_.smoothed())
        return d_ * (cell_b_.at(element).at(region) * element_dofs(element));
    const double g = 1.0 / std::sqrt(3.0);
    const Vec2 parent(quad::kCorners[region][0] * g, quad::kCorners[region][1] * g);
    return stress_at(element, parent);
}

int DiscreteSolution::owning_cell(const Vec2& parent) const
{
    const int nc = formulation_.smoothed() ? formulation_.subcells : 1;
    const int nx = nc == 1 ? 1 : (nc == 8 ? 4 : 2);
    const int ny = nc / nx;
    const int i = std::clamp(static_cast<int>(std::floor((parent.x() + 1) / 2 * nx)), 0, nx - 1);
    const int j = std::clamp(static_cast<int>(std::floor((parent.y() + 1) / 2 * ny)), 0, ny - 1);
    return j * nx + i;
}

Stress DiscreteSolution::stress_at(int element, const Vec2& parent) const
{
    if (formulation_.smoothed())
        return d_ * (cell_b_.at(element)[owning_cell(parent)] * element_dofs(element));
    return d_ * (quad::strain_matrix(mesh_->corners(element), parent) * element_dofs(element));
}

Vec2 DiscreteSolution::displacement_at(int element, const Vec2& parent) const
{
    const Eigen::Vector4d n = quad::shape(parent.x(), parent.y());
    const ElementVector q = element_dofs(element);
    Vec2 u = Vec2::Zero();
    for (int i = 0; i < 4; ++i)
        u += n(i) * Vec2(q(2 * i), q(2 * i + 1));
    return u;
}

Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh, const Material& material,
                                               const Formulation& formulation)
{
    if (formulation.smoothed() && !valid_subcell_count(formulation.subcells))
        throw std::invalid_argument("unsupported subcell count " + std::to_string(formulation.subcells));
    const Mat3 d = elasticity_matrix(material);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(64 * mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementMatrix k = element_stiffness(mesh.corners(e), formulation, d);
        const auto& nodes = mesh.element(e).nodes;
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b)
                triplets.emplace_back(2 * nodes[a / 2] + a % 2, 2 * nodes[b / 2] + b % 2, k(a, b));
    }
    Eigen::SparseMatrix<double> k(mesh.num_dofs(), mesh.num_dofs());
    k.setFromTriplets(triplets.begin(), triplets.end());
    return k;
}

Eigen::VectorXd assemble_loads(const Mesh& mesh, const BoundaryConditions& bcs)
{
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.num_dofs());
    const double g = 1.0 / std::sqrt(3.0);
    for (const BoundaryEdge& edge : mesh.boundary_edges()) {
        if (edge.tag.kind != BcKind::Neumann)
            continue;
        const Vec2 p0 = mesh.node(edge.nodes[0]);
        const Vec2 p1 = mesh.node(edge.nodes[1]);
        const double half = 0.5 * (p1 - p0).norm();
        const Vec2 n = edge_normal(mesh, edge);
        for (double s : {-g, g}) {
            const double n0 = 0.5 * (1 - s);
            const double n1 = 0.5 * (1 + s);
            const Vec2 t = bcs.traction(edge.tag, n0 * p0 + n1 * p1, n);
            f.segment<2>(2 * edge.nodes[0]) += n0 * half * t;
            f.segment<2>(2 * edge.nodes[1]) += n1 * half * t;
        }
    }
    return f;
}

namespace {

// Prescribed values per dof; NaN marks a free dof.
Eigen::VectorXd constrained_values(const Mesh& mesh, const BoundaryConditions& bcs)
{
    Eigen::VectorXd fixed = Eigen::VectorXd::Constant(mesh.num_dofs(), std::nan(""));
    for (const BoundaryEdge& edge : mesh.boundary_edges()) {
        if (edge.tag.kind != BcKind::Dirichlet)
            continue;
        const auto it = bcs.dirichlet.find(edge.tag.id);
        if (it == bcs.dirichlet.end())
            throw std::invalid_argument("no Dirichlet specification registered for tag " + std::to_string(edge.tag.id));
        const DirichletSpec& spec = it->second;
        for (int node : edge.nodes) {
            const Vec2 v = spec.value ? spec.value(mesh.node(node)) : Vec2::Zero();
            if (spec.fix_x)
                fixed(2 * node) = v.x();
            if (spec.fix_y)
                fixed(2 * node + 1) = v.y();
        }
    }
    for (const PointConstraint& pc : bcs.point_constraints) {
        if (pc.node < 0 || pc.node >= mesh.num_nodes() || pc.component < 0 || pc.component > 1)
            throw std::invalid_argument("point constraint references an unknown dof");
        fixed(2 * pc.node + pc.component) = pc.value;
    }
    return fixed;
}

void check_rigid_modes(const Mesh& mesh, const Eigen::VectorXd& fixed)
{
    Vec2 centroid = Vec2::Zero();
    for (const Vec2& p : mesh.nodes())
        centroid += p;
    centroid /= mesh.num_nodes();
    double extent = 0;
    for (const Vec2& p : mesh.nodes())
        extent = std::max(extent, (p - centroid).norm());

    std::vector<Eigen::RowVector3d> rows;
    for (int dof = 0; dof < fixed.size(); ++dof) {
        if (std::isnan(fixed(dof)))
            continue;
        const Vec2 p = (mesh.node(dof / 2) - centroid) / extent;
        rows.push_back(dof % 2 == 0 ? Eigen::RowVector3d(1, 0, -p.y()) : Eigen::RowVector3d(0, 1, p.x()));
    }
    Eigen::MatrixXd c(rows.size(), 3);
    for (std::size_t i = 0; i < rows.size(); ++i)
        c.row(i) = rows[i];

    static const char* names[] = {"translation x", "translation y", "rotation"};
    Eigen::Vector3d free_mode;
    if (rows.empty()) {
        free_mode = Eigen::Vector3d(1, 0, 0);
    } else {
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
        const Eigen::VectorXd s = svd.singularValues();
        if (s.size() == 3 && s(2) > 1e-10 * s(0))
            return;
        free_mode = svd.matrixV().col(std::min<int>(static_cast<int>(s.size()), 2));
    }
    int k = 0;
    free_mode.cwiseAbs().maxCoeff(&k);
    throw NumericalError(std::string("singular system: constraints leave the rigid-body mode '") + names[k] +
                         "' free");
}

} // namespace

DiscreteSolution assemble_and_solve(std::shared_ptr<const Mesh> mesh, const Material& material,
                                    const Formulation& formulation, std::shared_ptr<const BoundaryConditions> bcs)
{
    const Eigen::SparseMatrix<double> k = assemble_stiffness(*mesh, material, formulation);
    const Eigen::VectorXd f = assemble_loads(*mesh, *bcs);
    const Eigen::VectorXd fixed = constrained_values(*mesh, *bcs);
    check_rigid_modes(*mesh, fixed);

    const int n = mesh->num_dofs();
    std::vector<int> reduced(n, -1);
    int nf = 0;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (std::isnan(fixed(i)))
            reduced[i] = nf++;
        else
            u(i) = fixed(i);
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(k.nonZeros());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (int i = 0; i < n; ++i)
        if (reduced[i] >= 0)
            rhs(reduced[i]) = f(i);
    for (int col = 0; col < k.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
            const int r = reduced[it.row()];
            if (r < 0)
                continue;
            const int c = reduced[it.col()];
            if (c >= 0)
                triplets.emplace_back(r, c, it.value());
            else
                rhs(r) -= it.value() * u(it.col());
        }
    }
    Eigen::SparseMatrix<double> kff(nf, nf);
    kff.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(kff);
    if (chol.info() != Eigen::Success)
        throw NumericalError("stiffness factorisation failed: system is singular or indefinite");
    const Eigen::VectorXd uf = chol.solve(rhs);
    if (chol.info() != Eigen::Success || !uf.allFinite())
        throw NumericalError("stiffness solve failed");
    for (int i = 0; i < n; ++i)
        if (reduced[i] >= 0)
            u(i) = uf(reduced[i]);

    DiscreteSolution sol(mesh, material, formulation, std::move(bcs), std::move(u));
    const Eigen::VectorXd r = k * sol.displacements() - f;
    double res2 = 0, f2 = 0;
    for (int i = 0; i < n; ++i)
        if (reduced[i] >= 0) {
            res2 += r(i) * r(i);
            f2 += f(i) * f(i);
        }
    sol.residual_norm = std::sqrt(res2);
    sol.load_norm = std::sqrt(f2);
    return sol;
}

DiscreteSolution interpolate_solution(std::shared_ptr<const Mesh> mesh, const Material& material,
                                      const Formulation& formulation, std::shared_ptr<const BoundaryConditions> bcs,
                                      const std::function<Vec2(const Vec2&)>& field)
{
    Eigen::VectorXd u(mesh->num_dofs());
    for (int i = 0; i < mesh->num_nodes(); ++i)
        u.segment<2>(2 * i) = field(mesh->node(i));
    return DiscreteSolution(std::move(mesh), material, formulation, std::move(bcs), std::move(u));
}

} // namespace zzsfem
