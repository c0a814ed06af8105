#pragma once

// Superconvergent patch recovery with optional equilibrium/compatibility
// constraints (SPR-C), singular+smooth splitting (SPR-X) or both (SPR-CX).
// Vertex-patch polynomials are blended with the bilinear shape functions
// into a continuous recovered stress field.

#include "zzsfem/analytic.hpp"
#include "zzsfem/solver.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zzsfem {

enum class RecoveryVariant { SPR, SPR_C, SPR_X, SPR_CX };
enum class GsifMode { Exact, Extracted };

std::string to_string(RecoveryVariant v);
RecoveryVariant parse_variant(const std::string& s);
inline bool constrained(RecoveryVariant v) { return v == RecoveryVariant::SPR_C || v == RecoveryVariant::SPR_CX; }
inline bool splitting(RecoveryVariant v) { return v == RecoveryVariant::SPR_X || v == RecoveryVariant::SPR_CX; }

// q(r) = 1 for r <= inner, linear down to 0 at outer, 0 beyond.
struct PlateauFunction {
    double inner = 0.45;
    double outer = 0.9;
    Vec2 center = Vec2::Zero();

    double operator()(double r) const;
    double value(const Vec2& x) const { return (*this)((x - center).norm()); }
    // Gradient of q with respect to x (zero outside the ramp).
    Vec2 gradient(const Vec2& x) const;
};

struct RecoveryConfig {
    RecoveryVariant variant = RecoveryVariant::SPR_CX;
    int interior_degree = 1;
    int boundary_degree = 2;
    double splitting_radius = 0.5;
    GsifMode gsif_mode = GsifMode::Exact;
    // Required for SPR-X / SPR-CX; its GSIFs are used in Exact mode.
    std::optional<SingularSolution> singular;
    Vec2 singular_point = Vec2::Zero();
    PlateauFunction plateau;
};

struct SamplingPoint {
    int element = 0;
    int region = 0; // subcell (SFEM) or Gauss point (FEM)
    Vec2 position;
    Vec2 parent;
    Stress stress;
    double weight = 0;
};

// 2x2 Gauss points of every subcell carrying the subcell's constant stress
// (SFEM), or the 2x2 Gauss points of every element (FEM). Ordered by
// element, then region, then point.
std::vector<SamplingPoint> collect_sampling_points(const DiscreteSolution& solution);

// Williams stress with (estimated) GSIFs, centred at the singular vertex.
struct SingularStressField {
    SingularSolution solution;
    Vec2 center = Vec2::Zero();

    Stress operator()(const Vec2& x) const { return williams_stress(solution, x - center); }
};

// Singular part of the recovered stress. Exact mode passes the configured
// GSIFs through; Extracted mode replaces them by interaction-integral
// estimates from the solution.
SingularStressField singular_stress_estimate(const DiscreteSolution& solution, const SingularSolution& singular,
                                             GsifMode mode, const PlateauFunction& plateau,
                                             const Vec2& center = Vec2::Zero());

// Smooth part sigma^h - sigma_sing of the given samples.
std::vector<SamplingPoint> smooth_part(std::span<const SamplingPoint> samples, const SingularStressField& singular);

// Complete 2D monomial basis of degree 1 or 2 in patch-local coordinates:
// 1, x, y [, x^2, xy, y^2].
class PolynomialBasis {
public:
    explicit PolynomialBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(exponents_.size()); }
    const std::vector<std::pair<int, int>>& exponents() const { return exponents_; }

    Eigen::VectorXd values(const Vec2& local) const;
    // Maps coefficients of this basis to those of the derivative
    // d^(dx+dy)/dx^dx dy^dy, expressed in the basis of degree - dx - dy.
    Eigen::MatrixXd derivative_operator(int dx, int dy) const;

private:
    int degree_;
    std::vector<std::pair<int, int>> exponents_;
};

// Patch-local coordinates: centred at the patch node, scaled so the patch
// fits in the [-1,1] box.
struct PatchFrame {
    Vec2 center = Vec2::Zero();
    double scale = 1;

    Vec2 local(const Vec2& x) const { return (x - center) / scale; }
};

// A Neumann edge of a patch. Where two edges with the same tag meet at a
// shallow angle (a polygonal approximation of a smooth boundary) the end
// normals are the averaged vertex normals; otherwise they equal the edge normal.
struct BoundarySegment {
    Vec2 start;
    Vec2 end;
    Vec2 normal;
    BoundaryTag tag;
    Vec2 start_normal = Vec2::Zero();
    Vec2 end_normal = Vec2::Zero();
};

// Vertex normals of Neumann boundary nodes per incident edge end, as used by
// the traction collocation. Indexed like Mesh::boundary_edges().
std::vector<std::array<Vec2, 2>> neumann_vertex_normals(const Mesh& mesh, double max_kink_degrees = 30.0);

// Everything constraint assembly needs to know about one patch.
struct PatchContext {
    int node = 0;
    PatchFrame frame;
    std::vector<BoundarySegment> neumann_edges;
    const BoundaryConditions* bcs = nullptr;
    Mat3 compliance = Mat3::Identity();
    // Set for split patches: constraints apply to the smooth part.
    const SingularStressField* singular = nullptr;
};

struct ConstraintSet {
    Eigen::MatrixXd rows; // one row per scalar constraint on the 3*n coefficients
    Eigen::VectorXd rhs;
    int equilibrium = 0;
    int traction = 0;
    int compatibility = 0;

    int size() const { return static_cast<int>(rows.rows()); }
};

// Internal equilibrium (coefficient matching, zero body load), traction
// collocation at the distinct Neumann nodes of the patch (plus the midpoint
// of an edge with no same-tag neighbour, so each boundary piece carries three
// points) and compatibility of D^-1 sigma (degree 2 only). Empty for
// unconstrained variants.
ConstraintSet constraint_rows(const PatchContext& patch, RecoveryVariant variant, int degree);

// Keeps a maximal linearly independent subset of the (row-normalised)
// constraints; rows whose relative pivot falls below tol are dropped.
ConstraintSet independent_constraints(const ConstraintSet& c, double tol = 1e-10);

struct PatchFit {
    int node = 0;
    int degree = 1;
    PatchFrame frame;
    // Coefficients ordered [xx block, yy block, xy block].
    Eigen::VectorXd coefficients;
    bool split = false;
    int constraints_used = 0;

    Stress evaluate(const Vec2& x) const;
};

// Weighted least squares fit of the samples subject to the constraints,
// solved through the Lagrange-multiplier (KKT) system. Throws
// NumericalError if the system is singular.
PatchFit fit_patch(int node, std::span<const SamplingPoint> samples, const ConstraintSet& constraints, int degree,
                   const PatchFrame& frame);

class RecoveredStressField {
public:
    RecoveredStressField(std::shared_ptr<const Mesh> mesh, std::vector<PatchFit> fits,
                         std::optional<SingularStressField> singular);

    const PatchFit& fit(int node) const { return fits_.at(node); }
    const std::vector<PatchFit>& fits() const { return fits_; }
    const std::optional<SingularStressField>& singular() const { return singular_; }

    // Partition-of-unity blend of the element's vertex polynomials. Split
    // patches contribute their smooth polynomial plus the singular field.
    Stress at_parent(int element, const Vec2& parent) const;
    // Throws std::invalid_argument if x is not inside the element.
    Stress at(int element, const Vec2& x) const;

    // Number of patches whose fit fell back to a lower degree.
    int degree_fallbacks = 0;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<PatchFit> fits_;
    std::optional<SingularStressField> singular_;
};

RecoveredStressField recover(const DiscreteSolution& solution, const RecoveryConfig& config);

Stress recovered_stress_at(const RecoveredStressField& field, int element, const Vec2& x);

} // namespace zzsfem
