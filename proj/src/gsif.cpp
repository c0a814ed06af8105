#include "zzsfem/gsif.hpp"

#include <cmath>

namespace zzsfem {

namespace {

Vec2 traction(const Stress& s, const Vec2& n)
{
    return Vec2(s(0) * n.x() + s(2) * n.y(), s(2) * n.x() + s(1) * n.y());
}

// sigma_ij u_i q_,j
double flux(const Stress& s, const Vec2& u, const Vec2& grad_q)
{
    return traction(s, grad_q).dot(u);
}

} // namespace

double contour_interaction(const EigenField& a, const EigenField& b, double alpha, double radius, int points)
{
    const quad::GaussRule& g = quad::gauss_legendre(points);
    double sum = 0;
    for (int k = 0; k < points; ++k) {
        const double phi = 0.5 * alpha * g.points[k];
        const double w = 0.5 * alpha * g.weights[k] * radius;
        const Vec2 er(std::cos(phi), std::sin(phi));
        sum += w * (traction(a.stress(radius, phi), er).dot(b.displacement(radius, phi)) -
                    traction(b.stress(radius, phi), er).dot(a.displacement(radius, phi)));
    }
    return sum;
}

double domain_interaction(const DiscreteSolution& solution, const EigenField& aux, const PlateauFunction& plateau,
                          int* ring_elements)
{
    const Mesh& mesh = solution.mesh();
    double domain = 0;
    int ring = 0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const quad::Corners x = mesh.corners(e);
        double rmin = INFINITY, rmax = 0, diam = 0;
        for (int i = 0; i < 4; ++i) {
            const double r = (x.col(i) - plateau.center).norm();
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
            diam = std::max(diam, (x.col(i) - x.col((i + 2) % 4)).norm());
        }
        // the closest point of a convex quad may lie on an edge
        if (rmax <= plateau.inner || rmin - diam >= plateau.outer)
            continue;

        std::vector<std::pair<Vec2, Vec2>> regions;
        if (solution.formulation().smoothed())
            for (const SmoothingCell& c : solution.cells(e))
                regions.emplace_back(c.parent_lo, c.parent_hi);
        else
            regions.emplace_back(Vec2(-1, -1), Vec2(1, 1));

        double contribution = 0;
        bool touched = false;
        for (const auto& [lo, hi] : regions) {
            for (const quad::QuadraturePoint& qp : quad::tensor_rule(4, lo, hi)) {
                const Vec2 p = quad::map(x, qp.parent);
                const Vec2 gq = plateau.gradient(p);
                if (gq.isZero(0))
                    continue;
                touched = true;
                const double det = quad::jacobian(x, qp.parent).determinant();
                const Vec2 rel = p - plateau.center;
                const Stress sh = solution.stress_at(e, qp.parent);
                const Vec2 uh = solution.displacement_at(e, qp.parent);
                contribution += qp.weight * det * (flux(sh, aux.displacement(rel), gq) - flux(aux.stress(rel), uh, gq));
            }
        }
        if (touched)
            ++ring;
        domain += contribution;
    }

    // Boundary term where q does not vanish on the domain boundary.
    double boundary = 0;
    const quad::GaussRule& g = quad::gauss_legendre(6);
    for (const BoundaryEdge& edge : mesh.boundary_edges()) {
        const Vec2 p0 = mesh.node(edge.nodes[0]);
        const Vec2 p1 = mesh.node(edge.nodes[1]);
        if (std::min((p0 - plateau.center).norm(), (p1 - plateau.center).norm()) - (p1 - p0).norm() >= plateau.outer)
            continue;
        const Vec2 n = edge_normal(mesh, edge);
        const double half = 0.5 * (p1 - p0).norm();
        const Vec2 a = Vec2(quad::kCorners[edge.local_edge][0], quad::kCorners[edge.local_edge][1]);
        const Vec2 b = Vec2(quad::kCorners[(edge.local_edge + 1) % 4][0], quad::kCorners[(edge.local_edge + 1) % 4][1]);
        for (std::size_t k = 0; k < g.points.size(); ++k) {
            const double s = g.points[k];
            const Vec2 parent = 0.5 * (1 - s) * a + 0.5 * (1 + s) * b;
            const Vec2 p = 0.5 * (1 - s) * p0 + 0.5 * (1 + s) * p1;
            const double q = plateau.value(p);
            if (q == 0)
                continue;
            const Vec2 rel = p - plateau.center;
            const Vec2 th = edge.tag.kind == BcKind::Neumann
                                ? solution.boundary_conditions().traction(edge.tag, p, n)
                                : traction(solution.stress_at(edge.element, parent), n);
            const Vec2 uh = solution.displacement_at(edge.element, parent);
            boundary += g.weights[k] * half * q *
                        (th.dot(aux.displacement(rel)) - traction(aux.stress(rel), n).dot(uh));
        }
    }
    if (ring_elements)
        *ring_elements = ring;
    return boundary - domain;
}

double extract_gsif(const DiscreteSolution& solution, const SingularSolution& singular, Mode mode,
                    const PlateauFunction& plateau)
{
    if (!(plateau.inner > 0 && plateau.inner < plateau.outer))
        throw std::invalid_argument("plateau radii must satisfy 0 < inner < outer");
    const EigenField dual = singular.dual(mode);
    EigenField unit = singular.primal(mode);
    unit.amplitude = 1;
    const double norm = contour_interaction(unit, dual, singular.alpha);
    int ring = 0;
    const double value = domain_interaction(solution, dual, plateau, &ring);
    if (ring == 0)
        throw NumericalError("GSIF extraction: no element intersects the plateau ramp");
    return value / norm;
}

GsifEstimate extract_gsifs(const DiscreteSolution& solution, const SingularSolution& singular,
                           const PlateauFunction& plateau)
{
    GsifEstimate k;
    k.k_I = extract_gsif(solution, singular, Mode::I, plateau);
    k.k_II = extract_gsif(solution, singular, Mode::II, plateau);
    domain_interaction(solution, singular.dual(Mode::I), plateau, &k.ring_elements);
    return k;
}

} // namespace zzsfem
