#include "zzsfem/mesh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zzsfem {

Mesh::Mesh(std::vector<Vec2> nodes, std::vector<QuadElement> elements, std::vector<BoundaryEdge> boundary)
    : nodes_(std::move(nodes)), elements_(std::move(elements)), boundary_(std::move(boundary))
{
    const int nn = num_nodes();
    for (const Vec2& p : nodes_)
        if (!p.allFinite())
            throw std::invalid_argument("mesh: non-finite node coordinate");

    std::vector<int> counts(nn, 0);
    for (int e = 0; e < num_elements(); ++e) {
        QuadElement& el = elements_[e];
        if (el.id != e)
            throw std::invalid_argument("mesh: element ids must be dense and ordered, got " + std::to_string(el.id));
        for (int n : el.nodes) {
            if (n < 0 || n >= nn)
                throw std::invalid_argument("mesh: element " + std::to_string(e) + " references unknown node " +
                                            std::to_string(n));
            ++counts[n];
        }
        const quad::Corners x = corners(e);
        for (const auto& c : quad::kCorners)
            if (quad::jacobian(x, Vec2(c[0], c[1])).determinant() <= 0)
                throw std::invalid_argument("mesh: element " + std::to_string(e) + " is inverted or degenerate");
    }

    patch_offsets_.assign(nn + 1, 0);
    for (int n = 0; n < nn; ++n)
        patch_offsets_[n + 1] = patch_offsets_[n] + counts[n];
    patch_elements_.resize(patch_offsets_.back());
    std::vector<int> fill(patch_offsets_.begin(), patch_offsets_.end() - 1);
    for (int e = 0; e < num_elements(); ++e)
        for (int n : elements_[e].nodes)
            patch_elements_[fill[n]++] = e;

    boundary_node_.assign(nn, 0);
    for (const BoundaryEdge& b : boundary_) {
        if (b.element < 0 || b.element >= num_elements() || b.local_edge < 0 || b.local_edge > 3)
            throw std::invalid_argument("mesh: malformed boundary edge");
        const auto& en = elements_[b.element].nodes;
        if (b.nodes[0] != en[b.local_edge] || b.nodes[1] != en[(b.local_edge + 1) % 4])
            throw std::invalid_argument("mesh: boundary edge nodes disagree with element connectivity");
        boundary_node_[b.nodes[0]] = boundary_node_[b.nodes[1]] = 1;
    }
}

quad::Corners Mesh::corners(int element) const
{
    quad::Corners x;
    const auto& en = elements_.at(element).nodes;
    for (int i = 0; i < 4; ++i)
        x.col(i) = nodes_[en[i]];
    return x;
}

double Mesh::element_area(int element) const
{
    return polygon_area(corners(element));
}

std::span<const int> Mesh::node_patch(int node) const
{
    if (node < 0 || node >= num_nodes())
        throw std::out_of_range("mesh: unknown node id " + std::to_string(node));
    return {patch_elements_.data() + patch_offsets_[node],
            static_cast<std::size_t>(patch_offsets_[node + 1] - patch_offsets_[node])};
}

double polygon_area(const quad::Corners& x)
{
    double a = 0;
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        a += x(0, i) * x(1, j) - x(0, j) * x(1, i);
    }
    return 0.5 * a;
}

bool valid_subcell_count(int nc)
{
    return nc == 1 || nc == 2 || nc == 4 || nc == 8;
}

std::vector<SmoothingCell> subdivide_element(const quad::Corners& corners, int nc, int element_id)
{
    if (!valid_subcell_count(nc))
        throw std::invalid_argument("unsupported subcell count " + std::to_string(nc) + " (expected 1, 2, 4 or 8)");
    const int nx = nc == 1 ? 1 : (nc == 8 ? 4 : 2);
    const int ny = nc / nx;

    std::vector<SmoothingCell> cells;
    cells.reserve(nc);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            SmoothingCell c;
            c.element = element_id;
            c.index = j * nx + i;
            c.parent_lo = Vec2(-1 + 2.0 * i / nx, -1 + 2.0 * j / ny);
            c.parent_hi = Vec2(-1 + 2.0 * (i + 1) / nx, -1 + 2.0 * (j + 1) / ny);
            const std::array<Vec2, 4> pc{c.parent_lo, Vec2(c.parent_hi.x(), c.parent_lo.y()), c.parent_hi,
                                         Vec2(c.parent_lo.x(), c.parent_hi.y())};
            for (int k = 0; k < 4; ++k)
                c.corners.col(k) = quad::map(corners, pc[k]);
            c.area = polygon_area(c.corners);
            for (int k = 0; k < 4; ++k) {
                const Vec2 p0 = c.corners.col(k);
                const Vec2 p1 = c.corners.col((k + 1) % 4);
                const Vec2 d = p1 - p0;
                CellEdge& edge = c.edges[k];
                edge.length = d.norm();
                edge.midpoint = 0.5 * (p0 + p1);
                edge.normal = Vec2(d.y(), -d.x()) / edge.length;
            }
            cells.push_back(c);
        }
    }
    return cells;
}

std::vector<SmoothingCell> subdivide_element(const Mesh& mesh, int element, int nc)
{
    return subdivide_element(mesh.corners(element), nc, element);
}

Mesh build_cylinder_mesh(double a, double b, int level)
{
    if (!(a > 0))
        throw std::invalid_argument("inner radius must be positive");
    if (!(a < b))
        throw std::invalid_argument("inner radius must be smaller than the outer radius");
    if (level < 1 || level > 12)
        throw std::invalid_argument("cylinder refinement level must be in [1, 12]");

    const int n = 4 << (level - 1);
    const auto id = [n](int i, int j) { return j * (n + 1) + i; };

    std::vector<Vec2> nodes((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j) {
        const double phi = 0.5 * std::numbers::pi * j / n;
        const double c = j == n ? 0.0 : std::cos(phi);
        const double s = j == n ? 1.0 : std::sin(phi);
        for (int i = 0; i <= n; ++i) {
            const double r = i == n ? b : a + (b - a) * i / n;
            nodes[id(i, j)] = Vec2(r * c, r * s);
        }
    }

    std::vector<QuadElement> elements;
    std::vector<BoundaryEdge> boundary;
    elements.reserve(n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int e = static_cast<int>(elements.size());
            QuadElement el{e, {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}};
            elements.push_back(el);
            const auto edge = [&](int k, BoundaryTag tag) {
                boundary.push_back({e, k, {el.nodes[k], el.nodes[(k + 1) % 4]}, tag});
            };
            if (j == 0)
                edge(0, cylinder_tags::kSymmetryX);
            if (i == n - 1)
                edge(1, cylinder_tags::kOuterFree);
            if (j == n - 1)
                edge(2, cylinder_tags::kSymmetryY);
            if (i == 0)
                edge(3, cylinder_tags::kInnerPressure);
        }
    }
    return Mesh(std::move(nodes), std::move(elements), std::move(boundary));
}

namespace {

// Graded abscissae 0 = s_0 < ... < s_n = length with s_{k+1}-s_k growing
// geometrically; last/first spacing equals ratio.
std::vector<double> graded_abscissae(int n, double length, double ratio)
{
    std::vector<double> s(n + 1, 0.0);
    const double q = n > 1 ? std::pow(ratio, 1.0 / (n - 1)) : 1.0;
    double sum = 0, h = 1;
    std::vector<double> steps(n);
    for (int k = 0; k < n; ++k) {
        steps[k] = h;
        sum += h;
        h *= q;
    }
    for (int k = 0; k < n; ++k)
        s[k + 1] = s[k] + length * steps[k] / sum;
    s[n] = length;
    return s;
}

} // namespace

Mesh build_lshape_mesh(int level, double grading, const LShapeOptions& options)
{
    if (level < 0 || level > 8)
        throw std::invalid_argument("L-shape level must be in [0, 8]");
    if (!(grading >= 1.0 && grading <= 20.0))
        throw std::invalid_argument("L-shape grading must be in [1, 20]");
    if (!(options.half_size > 0) || options.base_divisions < 1)
        throw std::invalid_argument("L-shape size and base divisions must be positive");

    const int n = options.base_divisions << level;
    const std::vector<double> s = graded_abscissae(n, options.half_size, std::pow(grading, level));

    // Grid coordinate k in [0, 2n] maps to -s_{n-k} ... 0 ... s_{k-n}.
    std::vector<double> axis(2 * n + 1);
    for (int k = 0; k <= 2 * n; ++k)
        axis[k] = k < n ? -s[n - k] : s[k - n];

    // Removed quadrant: x < 0 and y < 0 in the canonical frame.
    const auto removed = [n](int i, int j) { return i < n && j < n; };
    std::vector<int> node_id((2 * n + 1) * (2 * n + 1), -1);
    std::vector<Vec2> canonical;
    const auto grid = [n](int i, int j) { return j * (2 * n + 1) + i; };
    for (int j = 0; j <= 2 * n; ++j)
        for (int i = 0; i <= 2 * n; ++i)
            if (!removed(i, j)) {
                node_id[grid(i, j)] = static_cast<int>(canonical.size());
                canonical.emplace_back(axis[i], axis[j]);
            }

    // Rotate by -pi/4 so the wedge bisector (canonical angle pi/4) becomes +x.
    const double c = std::sqrt(0.5);
    std::vector<Vec2> nodes;
    nodes.reserve(canonical.size());
    for (const Vec2& p : canonical)
        nodes.emplace_back(c * (p.x() + p.y()), c * (p.y() - p.x()));

    std::vector<QuadElement> elements;
    std::vector<BoundaryEdge> boundary;
    const auto element_exists = [&](int i, int j) {
        return i >= 0 && j >= 0 && i < 2 * n && j < 2 * n && !(i < n && j < n);
    };
    for (int j = 0; j < 2 * n; ++j) {
        for (int i = 0; i < 2 * n; ++i) {
            if (!element_exists(i, j))
                continue;
            const int e = static_cast<int>(elements.size());
            QuadElement el{e,
                           {node_id[grid(i, j)], node_id[grid(i + 1, j)], node_id[grid(i + 1, j + 1)],
                            node_id[grid(i, j + 1)]}};
            elements.push_back(el);
            // Neighbours across local edges 0..3: below, right, above, left.
            const std::array<std::pair<int, int>, 4> nb{{{i, j - 1}, {i + 1, j}, {i, j + 1}, {i - 1, j}}};
            for (int k = 0; k < 4; ++k) {
                if (element_exists(nb[k].first, nb[k].second))
                    continue;
                const Vec2& p0 = canonical[el.nodes[k]];
                const Vec2& p1 = canonical[el.nodes[(k + 1) % 4]];
                const bool on_face = (p0.x() == 0 && p1.x() == 0 && p0.y() <= 0 && p1.y() <= 0) ||
                                     (p0.y() == 0 && p1.y() == 0 && p0.x() <= 0 && p1.x() <= 0);
                boundary.push_back({e, k, {el.nodes[k], el.nodes[(k + 1) % 4]},
                                    on_face ? lshape_tags::kNotchFace : lshape_tags::kOuterTraction});
            }
        }
    }
    return Mesh(std::move(nodes), std::move(elements), std::move(boundary));
}

Mesh build_distorted_square_mesh(int divisions, double distortion)
{
    if (divisions < 1)
        throw std::invalid_argument("square mesh needs at least one division");
    if (!(distortion >= 0 && distortion < 0.5))
        throw std::invalid_argument("distortion must be in [0, 0.5)");
    const int n = divisions;
    const double h = 1.0 / n;
    std::vector<Vec2> nodes;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            Vec2 p(i * h, j * h);
            if (i > 0 && i < n && j > 0 && j < n) {
                // deterministic offsets in [-1, 1]
                const double a = std::sin(12.9898 * i + 78.233 * j);
                const double b = std::cos(39.3468 * i + 11.135 * j);
                p += distortion * h * Vec2(a, b);
            }
            nodes.push_back(p);
        }
    }
    const auto id = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<QuadElement> elements;
    std::vector<BoundaryEdge> boundary;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int e = static_cast<int>(elements.size());
            elements.push_back({e, {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}});
            const auto& el = elements.back().nodes;
            if (j == 0)
                boundary.push_back({e, 0, {el[0], el[1]}, patch_tags::kFixed});
            if (i == n - 1)
                boundary.push_back({e, 1, {el[1], el[2]}, patch_tags::kFixed});
            if (j == n - 1)
                boundary.push_back({e, 2, {el[2], el[3]}, patch_tags::kLoaded});
            if (i == 0)
                boundary.push_back({e, 3, {el[3], el[0]}, patch_tags::kFixed});
        }
    }
    return Mesh(std::move(nodes), std::move(elements), std::move(boundary));
}

} // namespace zzsfem
