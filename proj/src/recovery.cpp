#include "zzsfem/recovery.hpp"

#include "zzsfem/gsif.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace zzsfem {

std::string to_string(RecoveryVariant v)
{
    switch (v) {
    case RecoveryVariant::SPR:
        return "SPR";
    case RecoveryVariant::SPR_C:
        return "SPR-C";
    case RecoveryVariant::SPR_X:
        return "SPR-X";
    case RecoveryVariant::SPR_CX:
        return "SPR-CX";
    }
    return "?";
}

RecoveryVariant parse_variant(const std::string& s)
{
    for (RecoveryVariant v : {RecoveryVariant::SPR, RecoveryVariant::SPR_C, RecoveryVariant::SPR_X,
                              RecoveryVariant::SPR_CX})
        if (to_string(v) == s)
            return v;
    throw ConfigError("unknown recovery variant '" + s + "' (expected SPR, SPR-C, SPR-X or SPR-CX)");
}

double PlateauFunction::operator()(double r) const
{
    if (r <= inner)
        return 1.0;
    if (r >= outer)
        return 0.0;
    return (outer - r) / (outer - inner);
}

Vec2 PlateauFunction::gradient(const Vec2& x) const
{
    const Vec2 d = x - center;
    const double r = d.norm();
    if (r <= inner || r >= outer)
        return Vec2::Zero();
    return -d / (r * (outer - inner));
}

std::vector<SamplingPoint> collect_sampling_points(const DiscreteSolution& solution)
{
    const Mesh& mesh = solution.mesh();
    std::vector<SamplingPoint> points;
    const double g = 1.0 / std::sqrt(3.0);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const quad::Corners x = mesh.corners(e);
        if (solution.formulation().smoothed()) {
            for (const SmoothingCell& cell : solution.cells(e)) {
                const Stress s = solution.raw_stress(e, cell.index);
                for (const quad::QuadraturePoint& qp : quad::tensor_rule(2, cell.parent_lo, cell.parent_hi)) {
                    const double det = quad::jacobian(x, qp.parent).determinant();
                    points.push_back({e, cell.index, quad::map(x, qp.parent), qp.parent, s, qp.weight * det});
                }
            }
        } else {
            for (int r = 0; r < 4; ++r) {
                const Vec2 parent(quad::kCorners[r][0] * g, quad::kCorners[r][1] * g);
                const double det = quad::jacobian(x, parent).determinant();
                points.push_back({e, r, quad::map(x, parent), parent, solution.stress_at(e, parent), det});
            }
        }
    }
    return points;
}

SingularStressField singular_stress_estimate(const DiscreteSolution& solution, const SingularSolution& singular,
                                             GsifMode mode, const PlateauFunction& plateau, const Vec2& center)
{
    if (mode == GsifMode::Exact)
        return {singular, center};
    PlateauFunction p = plateau;
    p.center = center;
    const GsifEstimate k = extract_gsifs(solution, singular, p);
    return {singular.with_gsifs(k.k_I, k.k_II), center};
}

std::vector<SamplingPoint> smooth_part(std::span<const SamplingPoint> samples, const SingularStressField& singular)
{
    std::vector<SamplingPoint> out(samples.begin(), samples.end());
    for (SamplingPoint& s : out)
        s.stress -= singular(s.position);
    return out;
}

PolynomialBasis::PolynomialBasis(int degree) : degree_(degree)
{
    if (degree < 0 || degree > 2)
        throw std::invalid_argument("polynomial degree must be 0, 1 or 2");
    for (int d = 0; d <= degree; ++d)
        for (int j = 0; j <= d; ++j)
            exponents_.emplace_back(d - j, j);
}

Eigen::VectorXd PolynomialBasis::values(const Vec2& local) const
{
    Eigen::VectorXd v(size());
    for (int k = 0; k < size(); ++k)
        v(k) = std::pow(local.x(), exponents_[k].first) * std::pow(local.y(), exponents_[k].second);
    return v;
}

Eigen::MatrixXd PolynomialBasis::derivative_operator(int dx, int dy) const
{
    const int target_degree = degree_ - dx - dy;
    if (target_degree < 0)
        return Eigen::MatrixXd::Zero(0, size());
    const PolynomialBasis target(target_degree);
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(target.size(), size());
    const auto falling = [](int n, int k) {
        double f = 1;
        for (int i = 0; i < k; ++i)
            f *= n - i;
        return f;
    };
    for (int k = 0; k < size(); ++k) {
        const auto [i, j] = exponents_[k];
        if (i < dx || j < dy)
            continue;
        const auto it = std::find(target.exponents().begin(), target.exponents().end(), std::pair{i - dx, j - dy});
        op(it - target.exponents().begin(), k) = falling(i, dx) * falling(j, dy);
    }
    return op;
}

namespace {

void append(ConstraintSet& c, const Eigen::MatrixXd& rows, const Eigen::VectorXd& rhs)
{
    const auto old = c.rows.rows();
    c.rows.conservativeResize(old + rows.rows(), rows.cols());
    c.rhs.conservativeResize(old + rows.rows());
    c.rows.bottomRows(rows.rows()) = rows;
    c.rhs.tail(rows.rows()) = rhs;
}

} // namespace

ConstraintSet constraint_rows(const PatchContext& patch, RecoveryVariant variant, int degree)
{
    const PolynomialBasis basis(degree);
    const int n = basis.size();
    ConstraintSet c;
    c.rows.resize(0, 3 * n);
    c.rhs.resize(0);
    if (!constrained(variant))
        return c;

    // Internal equilibrium, zero body load: d/dx sxx + d/dy sxy = 0 and
    // d/dx sxy + d/dy syy = 0, for every monomial of the derivative.
    const Eigen::MatrixXd dx = basis.derivative_operator(1, 0);
    const Eigen::MatrixXd dy = basis.derivative_operator(0, 1);
    if (dx.rows() > 0) {
        const auto m = dx.rows();
        Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(2 * m, 3 * n);
        eq.block(0, 0, m, n) = dx;
        eq.block(0, 2 * n, m, n) = dy;
        eq.block(m, 2 * n, m, n) = dx;
        eq.block(m, n, m, n) = dy;
        append(c, eq, Eigen::VectorXd::Zero(2 * m));
        c.equilibrium = static_cast<int>(2 * m);
    }

    // Traction collocation: a quadratic description of the traction along
    // the patch boundary. Distinct Neumann nodes are collocated once per
    // normal; an edge without a same-tag neighbour in the patch also gets its
    // midpoint so that three points describe it.
    if (patch.bcs) {
        struct Point {
            Vec2 x;
            Vec2 normal;
            BoundaryTag tag;
        };
        std::vector<Point> points;
        const auto add = [&](const Vec2& x, const Vec2& normal, const BoundaryTag& tag) {
            const double tol = 1e-10 * patch.frame.scale;
            for (const Point& p : points)
                if ((p.x - x).norm() <= tol && (p.normal - normal).norm() <= 1e-10 && p.tag == tag)
                    return;
            points.push_back({x, normal, tag});
        };
        const auto shares_end = [&](const BoundarySegment& seg) {
            const double tol = 1e-10 * patch.frame.scale;
            for (const BoundarySegment& other : patch.neumann_edges) {
                if (&other == &seg || !(other.tag == seg.tag))
                    continue;
                for (const Vec2& a : {seg.start, seg.end})
                    for (const Vec2& b : {other.start, other.end})
                        if ((a - b).norm() <= tol)
                            return true;
            }
            return false;
        };
        for (const BoundarySegment& seg : patch.neumann_edges) {
            add(seg.start, seg.start_normal.isZero(0) ? seg.normal : seg.start_normal, seg.tag);
            add(seg.end, seg.end_normal.isZero(0) ? seg.normal : seg.end_normal, seg.tag);
            if (!shares_end(seg))
                add(0.5 * (seg.start + seg.end), seg.normal, seg.tag);
        }
        for (const Point& pt : points) {
            const Vec2& x = pt.x;
            const Vec2& normal = pt.normal;
            Vec2 t = patch.bcs->traction(pt.tag, x, normal);
            if (patch.singular) {
                const Vec2 d = x - patch.singular->center;
                if (d.norm() <= 1e-12 * patch.frame.scale)
                    continue; // singular vertex: smooth traction undefined
                const Stress ss = (*patch.singular)(x);
                t -= Vec2(ss(0) * normal.x() + ss(2) * normal.y(), ss(2) * normal.x() + ss(1) * normal.y());
            }
            const Eigen::VectorXd p = basis.values(patch.frame.local(x));
            Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(2, 3 * n);
            rows.block(0, 0, 1, n) = normal.x() * p.transpose();
            rows.block(0, 2 * n, 1, n) = normal.y() * p.transpose();
            rows.block(1, 2 * n, 1, n) = normal.x() * p.transpose();
            rows.block(1, n, 1, n) = normal.y() * p.transpose();
            append(c, rows, t);
            c.traction += 2;
        }
    }

    // Compatibility of eps = S sigma: d2/dy2 eps_xx + d2/dx2 eps_yy - d2/dxdy gamma_xy = 0.
    const Eigen::MatrixXd dxx = basis.derivative_operator(2, 0);
    if (dxx.rows() > 0) {
        const Eigen::MatrixXd dyy = basis.derivative_operator(0, 2);
        const Eigen::MatrixXd dxy = basis.derivative_operator(1, 1);
        const Mat3& s = patch.compliance;
        Eigen::MatrixXd rows(dxx.rows(), 3 * n);
        for (int j = 0; j < 3; ++j)
            rows.block(0, j * n, dxx.rows(), n) = s(0, j) * dyy + s(1, j) * dxx - s(2, j) * dxy;
        append(c, rows, Eigen::VectorXd::Zero(dxx.rows()));
        c.compatibility = static_cast<int>(dxx.rows());
    }
    return c;
}

std::vector<std::array<Vec2, 2>> neumann_vertex_normals(const Mesh& mesh, double max_kink_degrees)
{
    const auto& edges = mesh.boundary_edges();
    std::vector<std::array<Vec2, 2>> out(edges.size());
    // node -> incident Neumann edges (edge index, end index)
    std::vector<std::vector<std::pair<int, int>>> incident(mesh.num_nodes());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Vec2 n = edge_normal(mesh, edges[k]);
        out[k] = {n, n};
        if (edges[k].tag.kind != BcKind::Neumann)
            continue;
        incident[edges[k].nodes[0]].emplace_back(static_cast<int>(k), 0);
        incident[edges[k].nodes[1]].emplace_back(static_cast<int>(k), 1);
    }
    const double min_cos = std::cos(max_kink_degrees * std::numbers::pi / 180.0);
    for (const auto& inc : incident) {
        if (inc.size() != 2)
            continue;
        const auto [k0, end0] = inc[0];
        const auto [k1, end1] = inc[1];
        if (!(edges[k0].tag == edges[k1].tag))
            continue;
        const Vec2 n0 = edge_normal(mesh, edges[k0]);
        const Vec2 n1 = edge_normal(mesh, edges[k1]);
        if (n0.dot(n1) < min_cos)
            continue;
        const Vec2 avg = (n0 + n1).normalized();
        out[k0][end0] = avg;
        out[k1][end1] = avg;
    }
    return out;
}

ConstraintSet independent_constraints(const ConstraintSet& c, double tol)
{
    if (c.size() == 0)
        return c;
    Eigen::MatrixXd rows = c.rows;
    Eigen::VectorXd rhs = c.rhs;
    for (int i = 0; i < rows.rows(); ++i) {
        const double nrm = rows.row(i).norm();
        if (nrm > 0) {
            rows.row(i) /= nrm;
            rhs(i) /= nrm;
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rows.transpose());
    qr.setThreshold(tol);
    const Eigen::MatrixXd r = qr.matrixR().triangularView<Eigen::Upper>();
    const double lead = r.rows() > 0 && r.cols() > 0 ? std::abs(r(0, 0)) : 0.0;
    std::vector<int> keep;
    for (int k = 0; k < std::min(r.rows(), r.cols()); ++k)
        if (lead > 0 && std::abs(r(k, k)) > tol * lead)
            keep.push_back(qr.colsPermutation().indices()(k));
    std::sort(keep.begin(), keep.end());

    ConstraintSet out;
    out.rows.resize(static_cast<Eigen::Index>(keep.size()), rows.cols());
    out.rhs.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.rows.row(i) = rows.row(keep[i]);
        out.rhs(i) = rhs(keep[i]);
    }
    out.equilibrium = c.equilibrium;
    out.traction = c.traction;
    out.compatibility = c.compatibility;
    return out;
}

Stress PatchFit::evaluate(const Vec2& x) const
{
    const PolynomialBasis basis(degree);
    const Eigen::VectorXd p = basis.values(frame.local(x));
    const int n = basis.size();
    return Stress(p.dot(coefficients.segment(0, n)), p.dot(coefficients.segment(n, n)),
                  p.dot(coefficients.segment(2 * n, n)));
}

PatchFit fit_patch(int node, std::span<const SamplingPoint> samples, const ConstraintSet& constraints, int degree,
                   const PatchFrame& frame)
{
    const PolynomialBasis basis(degree);
    const int n = basis.size();
    const int m = constraints.size();

    double wsum = 0;
    for (const SamplingPoint& s : samples)
        wsum += s.weight;
    if (!(wsum > 0))
        throw NumericalError("patch of node " + std::to_string(node) + " has no sampling points");

    Eigen::MatrixXd pp = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd ps = Eigen::MatrixXd::Zero(n, 3);
    for (const SamplingPoint& s : samples) {
        const Eigen::VectorXd p = basis.values(frame.local(s.position));
        const double w = s.weight / wsum;
        pp.noalias() += w * p * p.transpose();
        ps.noalias() += w * p * s.stress.transpose();
    }

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(3 * n + m, 3 * n + m);
    Eigen::VectorXd rhs(3 * n + m);
    for (int j = 0; j < 3; ++j) {
        kkt.block(j * n, j * n, n, n) = pp;
        rhs.segment(j * n, n) = ps.col(j);
    }
    if (m > 0) {
        kkt.block(3 * n, 0, m, 3 * n) = constraints.rows;
        kkt.block(0, 3 * n, 3 * n, m) = constraints.rows.transpose();
        rhs.tail(m) = constraints.rhs;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    lu.setThreshold(1e-11);
    if (lu.rank() < kkt.rows())
        throw NumericalError("singular patch system at node " + std::to_string(node) + " (degree " +
                             std::to_string(degree) + ")");
    const Eigen::VectorXd sol = lu.solve(rhs);

    PatchFit fit;
    fit.node = node;
    fit.degree = degree;
    fit.frame = frame;
    fit.coefficients = sol.head(3 * n);
    fit.constraints_used = m;
    return fit;
}

RecoveredStressField::RecoveredStressField(std::shared_ptr<const Mesh> mesh, std::vector<PatchFit> fits,
                                           std::optional<SingularStressField> singular)
    : mesh_(std::move(mesh)), fits_(std::move(fits)), singular_(std::move(singular))
{
    if (static_cast<int>(fits_.size()) != mesh_->num_nodes())
        throw std::invalid_argument("recovered field needs one patch fit per node");
}

Stress RecoveredStressField::at_parent(int element, const Vec2& parent) const
{
    const quad::Corners x = mesh_->corners(element);
    const Vec2 p = quad::map(x, parent);
    const Eigen::Vector4d n = quad::shape(parent.x(), parent.y());
    const auto& nodes = mesh_->element(element).nodes;
    Stress s = Stress::Zero();
    double split_weight = 0;
    for (int i = 0; i < 4; ++i) {
        const PatchFit& f = fits_[nodes[i]];
        s += n(i) * f.evaluate(p);
        if (f.split)
            split_weight += n(i);
    }
    if (split_weight > 0 && singular_)
        s += split_weight * (*singular_)(p);
    return s;
}

Stress RecoveredStressField::at(int element, const Vec2& x) const
{
    const Vec2 parent = quad::inverse_map(mesh_->corners(element), x);
    if (parent.cwiseAbs().maxCoeff() > 1 + 1e-10)
        throw std::invalid_argument("point lies outside element " + std::to_string(element));
    return at_parent(element, parent);
}

Stress recovered_stress_at(const RecoveredStressField& field, int element, const Vec2& x)
{
    return field.at(element, x);
}

RecoveredStressField recover(const DiscreteSolution& solution, const RecoveryConfig& config)
{
    const Mesh& mesh = solution.mesh();
    if (config.interior_degree < 1 || config.interior_degree > 2 || config.boundary_degree < 1 ||
        config.boundary_degree > 2)
        throw std::invalid_argument("recovery polynomial degrees must be 1 or 2");

    std::optional<SingularStressField> singular;
    // Without a singular solution (smooth problems) the splitting variants
    // reduce to their unsplit counterparts.
    if (splitting(config.variant) && config.singular) {
        if (config.splitting_radius < 0)
            throw std::invalid_argument("splitting radius must be non-negative");
        singular = singular_stress_estimate(solution, *config.singular, config.gsif_mode, config.plateau,
                                            config.singular_point);
    }

    const std::vector<SamplingPoint> samples = collect_sampling_points(solution);
    std::vector<int> offsets(mesh.num_elements() + 1, 0);
    for (const SamplingPoint& s : samples)
        ++offsets[s.element + 1];
    for (int e = 0; e < mesh.num_elements(); ++e)
        offsets[e + 1] += offsets[e];

    std::vector<std::vector<int>> element_neumann(mesh.num_elements());
    std::vector<char> neumann_node(mesh.num_nodes(), 0);
    const auto& edges = mesh.boundary_edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (edges[k].tag.kind != BcKind::Neumann)
            continue;
        element_neumann[edges[k].element].push_back(static_cast<int>(k));
        neumann_node[edges[k].nodes[0]] = neumann_node[edges[k].nodes[1]] = 1;
    }

    const std::vector<std::array<Vec2, 2>> vertex_normals = neumann_vertex_normals(mesh);
    const Mat3 compliance = compliance_matrix(solution.material());
    std::vector<PatchFit> fits;
    fits.reserve(mesh.num_nodes());
    int fallbacks = 0;
    for (int node = 0; node < mesh.num_nodes(); ++node) {
        const std::span<const int> patch = mesh.node_patch(node);
        PatchContext ctx;
        ctx.node = node;
        ctx.frame.center = mesh.node(node);
        double extent = 0;
        std::vector<SamplingPoint> local;
        for (int e : patch) {
            for (int k : mesh.element(e).nodes)
                extent = std::max(extent, (mesh.node(k) - ctx.frame.center).cwiseAbs().maxCoeff());
            local.insert(local.end(), samples.begin() + offsets[e], samples.begin() + offsets[e + 1]);
            if (neumann_node[node])
                for (int k : element_neumann[e])
                    ctx.neumann_edges.push_back({mesh.node(edges[k].nodes[0]), mesh.node(edges[k].nodes[1]),
                                                 edge_normal(mesh, edges[k]), edges[k].tag, vertex_normals[k][0],
                                                 vertex_normals[k][1]});
        }
        ctx.frame.scale = extent > 0 ? extent : 1.0;
        ctx.bcs = &solution.boundary_conditions();
        ctx.compliance = compliance;

        const bool split =
            singular && (mesh.node(node) - config.singular_point).norm() < config.splitting_radius;
        if (split) {
            ctx.singular = &*singular;
            local = smooth_part(local, *singular);
        }

        int degree = mesh.is_boundary_node(node) ? config.boundary_degree : config.interior_degree;
        PatchFit fit;
        for (;;) {
            try {
                const ConstraintSet c = independent_constraints(constraint_rows(ctx, config.variant, degree));
                fit = fit_patch(node, local, c, degree, ctx.frame);
                break;
            } catch (const NumericalError&) {
                if (degree == 1)
                    throw;
                --degree;
                ++fallbacks;
            }
        }
        fit.split = split;
        fits.push_back(std::move(fit));
    }
    RecoveredStressField field(solution.mesh_ptr(), std::move(fits), std::move(singular));
    field.degree_fallbacks = fallbacks;
    return field;
}

} // namespace zzsfem
