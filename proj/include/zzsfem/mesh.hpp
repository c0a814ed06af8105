#pragma once

#include "zzsfem/quad.hpp"
#include "zzsfem/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace zzsfem {

enum class BcKind { Neumann, Dirichlet };

// A boundary condition reference: which traction function (Neumann) or
// constraint specification (Dirichlet) applies to an edge.
struct BoundaryTag {
    BcKind kind = BcKind::Neumann;
    int id = 0;

    friend bool operator==(const BoundaryTag&, const BoundaryTag&) = default;
};

struct QuadElement {
    int id = 0;
    std::array<int, 4> nodes{}; // counter-clockwise
};

// Local edge k joins element nodes k and (k+1)%4.
struct BoundaryEdge {
    int element = 0;
    int local_edge = 0;
    std::array<int, 2> nodes{};
    BoundaryTag tag;
};

struct CellEdge {
    Vec2 midpoint;
    Vec2 normal; // outward unit normal
    double length = 0;
};

// Quadrilateral subcell of an element, defined as the image of the parent
// rectangle [parent_lo, parent_hi] under the element's bilinear map.
struct SmoothingCell {
    int element = 0;
    int index = 0;
    Vec2 parent_lo;
    Vec2 parent_hi;
    quad::Corners corners;
    double area = 0;
    std::array<CellEdge, 4> edges;
};

class Mesh {
public:
    Mesh() = default;

    // Validates connectivity (ids in range, positive corner Jacobians) and
    // builds the node -> element adjacency. Throws std::invalid_argument.
    Mesh(std::vector<Vec2> nodes, std::vector<QuadElement> elements, std::vector<BoundaryEdge> boundary);

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int num_dofs() const { return 2 * num_nodes(); }

    const Vec2& node(int id) const { return nodes_[id]; }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    const QuadElement& element(int id) const { return elements_[id]; }
    const std::vector<QuadElement>& elements() const { return elements_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

    quad::Corners corners(int element) const;
    double element_area(int element) const;

    // Elements whose connectivity contains the node, in ascending id order.
    std::span<const int> node_patch(int node) const;

    bool is_boundary_node(int node) const { return boundary_node_.at(node); }

private:
    std::vector<Vec2> nodes_;
    std::vector<QuadElement> elements_;
    std::vector<BoundaryEdge> boundary_;
    std::vector<int> patch_offsets_;
    std::vector<int> patch_elements_;
    std::vector<char> boundary_node_;
};

// Shoelace area of a quadrilateral with straight edges.
double polygon_area(const quad::Corners& x);

// Splits an element into nc in {1,2,4,8} smoothing cells in the parent
// domain: 1 whole, 2 halves at xi=0, 4 as 2x2, 8 as 4x2 (xi by eta).
std::vector<SmoothingCell> subdivide_element(const quad::Corners& corners, int nc, int element_id = 0);
std::vector<SmoothingCell> subdivide_element(const Mesh& mesh, int element, int nc);

bool valid_subcell_count(int nc);

// Boundary tags used by the generated benchmark meshes.
namespace cylinder_tags {
inline constexpr BoundaryTag kInnerPressure{BcKind::Neumann, 0};
inline constexpr BoundaryTag kOuterFree{BcKind::Neumann, 1};
inline constexpr BoundaryTag kSymmetryX{BcKind::Dirichlet, 0}; // phi = 0 edge, u_y = 0
inline constexpr BoundaryTag kSymmetryY{BcKind::Dirichlet, 1}; // phi = pi/2 edge, u_x = 0
} // namespace cylinder_tags

namespace patch_tags {
inline constexpr BoundaryTag kFixed{BcKind::Dirichlet, 0}; // left, bottom and right sides
inline constexpr BoundaryTag kLoaded{BcKind::Neumann, 0};  // top side
} // namespace patch_tags

namespace lshape_tags {
inline constexpr BoundaryTag kOuterTraction{BcKind::Neumann, 0};
inline constexpr BoundaryTag kNotchFace{BcKind::Neumann, 1};
} // namespace lshape_tags

// Structured (4*2^(n-1))^2 mesh of the quarter annulus a <= r <= b,
// 0 <= phi <= pi/2.
Mesh build_cylinder_mesh(double a, double b, int level);

// L-shaped domain: the square [-h,h]^2 with one quadrant removed, rotated so
// that the bisector of the material wedge is the +x axis and the reentrant
// corner sits at the origin. The notch faces lie on phi = +-3pi/4.
// Each of the three quadrants carries an (base * 2^level)^2 tensor grid whose
// spacing grows geometrically away from the corner; the ratio between the
// largest and smallest spacing is grading^level.
struct LShapeOptions {
    double half_size = 1.0;
    int base_divisions = 4;
};
Mesh build_lshape_mesh(int level, double grading, const LShapeOptions& options = {});

// n x n mesh of the unit square with interior nodes displaced by a fixed
// pseudo-random pattern of amplitude distortion * h (patch tests).
Mesh build_distorted_square_mesh(int divisions, double distortion = 0.25);

} // namespace zzsfem
