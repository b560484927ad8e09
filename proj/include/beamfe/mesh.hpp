#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "beamfe/element.hpp"

namespace beamfe {

struct Node {
    Vec3 position = Vec3::Zero();
};

/// A beam assembly: vertices plus mixed elements of one shared order.
/// Elements store their own reference geometry; node positions duplicate
/// the element end coefficients and are checked for consistency.
struct Mesh {
    int order = 1;
    std::vector<Node> nodes;
    std::vector<ElementDef> elements;

    double length() const;

    /// Checks orders, node references, element lengths, and the agreement
    /// of element end coefficients with node positions. Throws InvalidMesh
    /// or DanglingNode.
    void validate() const;
};

/// Beam axis described by its material frame as a function of arc length
/// (first frame column = unit tangent) plus the start point.
struct FrameCurve {
    std::function<Rotation(double)> frame;
    Vec3 start = Vec3::Zero();
    double length = 0.0;
};

/// Meshes a frame curve with n elements of order k. Element rotation
/// references are the L2 projections of the relative rotation against the
/// midpoint frame; centerline coefficients are integrated from the
/// discrete frame field so the reference force strain vanishes at the
/// reduced quadrature points and the reference is in discrete equilibrium.
/// Node positions follow the same integration (they drift from the exact
/// curve at the discretization order, not more).
Mesh mesh_from_curve(const FrameCurve& curve, int n, int k, const CrossSection& cs);

/// Straight beam along e1 from the origin.
Mesh build_straight(double length, int n, int k, const CrossSection& cs);

/// Coordinate plane of an arc: the arc starts at the origin with tangent
/// along the first named axis and curves toward the second.
enum class ArcPlane { kXY, kXZ, kYZ };

/// Circular arc of the given radius and opening angle.
Mesh build_arc(double radius, double angle, ArcPlane plane, int n, int k, const CrossSection& cs);

/// Helix around the z axis starting at (radius, 0, 0): n_coils full turns
/// rising by height in total.
Mesh build_helix(double radius, double height, double n_coils, int n, int k,
                 const CrossSection& cs);

/// Chain of straight segments through the given points, n_per_segment
/// elements each. Segment frames map e1 to the segment direction by the
/// smallest rotation (a segment along -e1 rotates about e3); kinks between
/// segments are preserved exactly by the per-element end references.
Mesh build_polyline(const std::vector<Vec3>& points, int n_per_segment, int k,
                    const CrossSection& cs);

/// Straight shaft from the origin along e1 plus two quarter-circle tines
/// branching at the shaft tip toward +y and -y, each ending with tangent
/// e1 at (shaft_length + tine_radius, +-tine_radius, 0). All three limbs
/// share the branch vertex.
Mesh build_fork(double shaft_length, double tine_radius, int n_shaft, int n_tine, int k,
                const CrossSection& cs);

/// Element end used as the orientation reference of a node (the anchor
/// frame of follower nodal moments): the lowest-index element whose right
/// end is the node, else the lowest-index element starting there.
struct NodeAnchor {
    int element = -1;
    int end = 0;  // 0 = left end, 1 = right end
};

/// Global numbering: 6 dofs per node (position, vertex rotation), then 9k
/// per element (bubbles, moment coefficients, psi_lo, psi_ho). When
/// condensed is set the solver eliminates each element's moment and
/// rotation dofs (a contiguous global range) before the global solve;
/// the numbering itself is unchanged.
struct DofLayout {
    int order = 1;
    int node_count = 0;
    int element_count = 0;
    int total = 0;
    bool condensed = false;
    std::vector<std::array<int, 2>> connectivity;
    std::vector<NodeAnchor> anchors;

    int node_position(int node) const { return 6 * node; }
    int node_rotation(int node) const { return 6 * node + 3; }
    int element_base(int e) const { return 6 * node_count + 9 * order * e; }

    /// First global dof of a local block (see layout:: in element.hpp).
    int block_dof(int e, int block) const;

    /// Global indices of all 9k+12 local dofs of element e.
    std::vector<int> element_dofs(int e) const;

    /// Global range [begin, end) eliminated for element e when condensing:
    /// its moment, psi_lo, and psi_ho dofs.
    std::pair<int, int> condensed_range(int e) const;

    Eigen::VectorXd gather(int e, const Eigen::VectorXd& global) const;
    void scatter_add(int e, const Eigen::VectorXd& local, Eigen::VectorXd& global) const;
};

/// Builds the layout after validating the mesh against the given order.
DofLayout dof_layout(const Mesh& mesh, int k, bool condensed);

/// Global dof vector of the reference configuration.
Eigen::VectorXd reference_state(const Mesh& mesh, const DofLayout& layout);

}  // namespace beamfe
