#include "beamfe/mesh.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace beamfe {

namespace {

constexpr double kPi = std::numbers::pi;

// Smallest rotation taking e1 to the given unit tangent; a reversal is
// resolved as a half turn about e3.
Rotation frame_for_tangent(const Vec3& t) {
    const double c = t.x();
    if (c >= 1.0 - 1e-14) return Rotation::identity();
    if (c <= -1.0 + 1e-14) return exp_rotvec(kPi * Vec3::UnitZ());
    const Vec3 cross = Vec3::UnitX().cross(t);
    const double angle = std::atan2(cross.norm(), c);
    return exp_rotvec(angle * cross.normalized());
}

// Splices a chain piece into m, identifying the piece's first node with an
// existing node of m.
void append_piece(Mesh& m, Mesh&& piece, int shared) {
    const int offset = static_cast<int>(m.nodes.size());
    for (size_t i = 1; i < piece.nodes.size(); ++i) m.nodes.push_back(piece.nodes[i]);
    for (ElementDef& el : piece.elements) {
        const auto remap = [&](int id) { return id == 0 ? shared : offset + id - 1; };
        el.nodes = {remap(el.nodes[0]), remap(el.nodes[1])};
        m.elements.push_back(std::move(el));
    }
}

}  // namespace

double Mesh::length() const {
    double total = 0.0;
    for (const ElementDef& e : elements) total += e.length();
    return total;
}

void Mesh::validate() const {
    if (order < 1) throw InvalidMesh("mesh order must be at least 1");
    if (nodes.empty() || elements.empty())
        throw InvalidMesh("mesh must contain nodes and elements");
    std::vector<char> used(nodes.size(), 0);
    for (const ElementDef& d : elements) {
        if (d.order != order) throw InvalidMesh("element order differs from the mesh order");
        if (!(d.jacobian > 0.0)) throw InvalidMesh("element length must be positive");
        if (d.nodes[0] == d.nodes[1]) throw InvalidMesh("element connects a node to itself");
        for (int side = 0; side < 2; ++side) {
            const int nid = d.nodes[side];
            if (nid < 0 || nid >= static_cast<int>(nodes.size()))
                throw InvalidMesh("element references a missing node");
            used[nid] = 1;
            const Vec3 expect = nodes[nid].position;
            if ((Vec3(d.r0.col(side)) - expect).norm() > 1e-9 * (1.0 + expect.norm()))
                throw InvalidMesh("element end coefficient does not match its node position");
        }
    }
    for (size_t i = 0; i < used.size(); ++i)
        if (!used[i])
            throw DanglingNode("node " + std::to_string(i) + " is not referenced by any element");
}

Mesh mesh_from_curve(const FrameCurve& curve, int n, int k, const CrossSection& cs) {
    if (n < 1) throw InvalidMesh("a mesh needs at least one element");
    if (k < 1) throw InvalidMesh("element order must be at least 1");
    if (!(curve.length > 0.0)) throw InvalidMesh("curve length must be positive");
    if (!curve.frame) throw InvalidMesh("curve frame function is empty");
    cs.validate();

    Mesh m;
    m.order = k;
    const double h = curve.length / n;
    const double jac = 0.5 * h;
    const QuadratureRule& reduced = gauss_rule(k);
    const QuadratureRule& projection = gauss_rule(k + 3);

    Vec3 cursor = curve.start;
    m.nodes.push_back({cursor});

    for (int e = 0; e < n; ++e) {
        const double s_mid = (e + 0.5) * h;
        ElementDef d;
        d.order = k;
        d.nodes = {e, e + 1};
        d.jacobian = jac;
        d.section = cs;

        const Rotation mid = curve.frame(s_mid);
        d.psi0_lo = log_rotation(mid);

        // L2 projection of the relative rotation onto P_1 .. P_{k-1}
        d.psi0_ho.setZero(3, k - 1);
        for (int q = 0; q < projection.points.size(); ++q) {
            const double xi = projection.points(q);
            const Vec3 rel = relative_rotvec(mid, curve.frame(s_mid + jac * xi));
            if (rel.norm() >= 0.999 * kPi)
                throw InvalidMesh("an element spans a rotation close to pi; refine the mesh");
            const LegendreEval lb = legendre_basis(k, xi);
            for (int j = 1; j < k; ++j)
                d.psi0_ho.col(j - 1) +=
                    0.5 * (2.0 * j + 1.0) * projection.weights(q) * lb.value(j) * rel;
        }

        // integrate the centerline from the tangent of the discrete frame
        // field, matched at the reduced quadrature points
        std::vector<Vec3> a(k, Vec3::Zero());
        for (int q = 0; q < reduced.points.size(); ++q) {
            const double xi = reduced.points(q);
            const Vec3 t = rotate(local_rotation(d.psi0_lo, d.psi0_ho, xi), Vec3::UnitX());
            const LegendreEval lb = legendre_basis(k, xi);
            for (int j = 0; j < k; ++j)
                a[j] += 0.5 * (2.0 * j + 1.0) * reduced.weights(q) * lb.value(j) * t;
        }
        d.r0.setZero(3, k + 1);
        d.r0.col(0) = cursor;
        d.r0.col(1) = cursor + 2.0 * jac * a[0];
        for (int deg = 2; deg <= k; ++deg) d.r0.col(deg) = jac * a[deg - 1] / (2.0 * deg - 1.0);

        d.finalize();
        cursor = d.r0.col(1);
        m.nodes.push_back({cursor});
        m.elements.push_back(std::move(d));
    }
    return m;
}

Mesh build_straight(double length, int n, int k, const CrossSection& cs) {
    FrameCurve c;
    c.frame = [](double) { return Rotation::identity(); };
    c.start = Vec3::Zero();
    c.length = length;
    return mesh_from_curve(c, n, k, cs);
}

Mesh build_arc(double radius, double angle, ArcPlane plane, int n, int k,
               const CrossSection& cs) {
    if (!(radius > 0.0) || !(angle > 0.0))
        throw InvalidMesh("arc radius and angle must be positive");
    Vec3 axis;
    Rotation base = Rotation::identity();
    switch (plane) {
        case ArcPlane::kXY:
            axis = Vec3::UnitZ();
            break;
        case ArcPlane::kXZ:
            axis = -Vec3::UnitY();
            break;
        case ArcPlane::kYZ:
            axis = Vec3::UnitX();
            base = exp_rotvec(0.5 * kPi * Vec3::UnitZ());
            break;
    }
    FrameCurve c;
    c.frame = [axis, base, radius](double s) {
        return compose(exp_rotvec((s / radius) * axis), base);
    };
    c.start = Vec3::Zero();
    c.length = radius * angle;
    return mesh_from_curve(c, n, k, cs);
}

Mesh build_helix(double radius, double height, double n_coils, int n, int k,
                 const CrossSection& cs) {
    if (!(radius > 0.0) || !(n_coils > 0.0))
        throw InvalidMesh("helix radius and coil count must be positive");
    const double turn = 2.0 * kPi * n_coils;
    const double slope = height / (turn * radius);
    const double stretch = std::sqrt(1.0 + slope * slope);
    const Rotation base = compose(exp_rotvec(0.5 * kPi * Vec3::UnitZ()),
                                  exp_rotvec(-std::atan(slope) * Vec3::UnitY()));
    FrameCurve c;
    c.frame = [radius, stretch, base](double s) {
        return compose(exp_rotvec((s / (radius * stretch)) * Vec3::UnitZ()), base);
    };
    c.start = Vec3(radius, 0.0, 0.0);
    c.length = stretch * turn * radius;
    return mesh_from_curve(c, n, k, cs);
}

Mesh build_polyline(const std::vector<Vec3>& points, int n_per_segment, int k,
                    const CrossSection& cs) {
    if (points.size() < 2) throw InvalidMesh("a polyline needs at least two points");
    Mesh m;
    m.order = k;
    m.nodes.push_back({points[0]});
    for (size_t seg = 0; seg + 1 < points.size(); ++seg) {
        const Vec3 d = points[seg + 1] - points[seg];
        const double len = d.norm();
        if (!(len > 0.0)) throw InvalidMesh("zero-length polyline segment");
        const Rotation f = frame_for_tangent(d / len);
        FrameCurve c;
        c.frame = [f](double) { return f; };
        c.start = points[seg];
        c.length = len;
        append_piece(m, mesh_from_curve(c, n_per_segment, k, cs),
                     static_cast<int>(m.nodes.size()) - 1);
    }
    return m;
}

Mesh build_fork(double shaft_length, double tine_radius, int n_shaft, int n_tine, int k,
                const CrossSection& cs) {
    if (!(shaft_length > 0.0) || !(tine_radius > 0.0))
        throw InvalidMesh("fork dimensions must be positive");
    Mesh m = build_straight(shaft_length, n_shaft, k, cs);
    const int branch = n_shaft;
    const Vec3 branch_pos = m.nodes[branch].position;
    const double r = tine_radius;

    FrameCurve up;  // quarter circle toward +y, tip tangent back along e1
    up.frame = [r](double s) {
        const double theta = kPi - s / r;
        return exp_rotvec((theta - 0.5 * kPi) * Vec3::UnitZ());
    };
    up.start = branch_pos;
    up.length = 0.5 * kPi * r;

    FrameCurve down;  // mirror image toward -y
    down.frame = [r](double s) {
        const double theta = kPi + s / r;
        return exp_rotvec((theta - 1.5 * kPi) * Vec3::UnitZ());
    };
    down.start = branch_pos;
    down.length = 0.5 * kPi * r;

    append_piece(m, mesh_from_curve(up, n_tine, k, cs), branch);
    append_piece(m, mesh_from_curve(down, n_tine, k, cs), branch);
    return m;
}

int DofLayout::block_dof(int e, int block) const {
    const int k = order;
    const auto& nn = connectivity[e];
    if (block == layout::pos_left()) return 6 * nn[0];
    if (block == layout::pos_right()) return 6 * nn[1];
    if (block == layout::vertex_left(k)) return 6 * nn[0] + 3;
    if (block == layout::vertex_right(k)) return 6 * nn[1] + 3;
    const int base = element_base(e);
    if (block <= k) return base + 3 * (block - 2);                          // bubbles
    if (block <= 2 * k + 1) return base + 3 * (k - 1) + 3 * (block - k - 1);  // moments
    if (block == layout::rot_lo(k)) return base + 6 * k;
    return base + 6 * k + 3 + 3 * (block - (2 * k + 3));  // psi_ho
}

std::vector<int> DofLayout::element_dofs(int e) const {
    std::vector<int> map(layout::dof_count(order));
    for (int b = 0; b < layout::block_count(order); ++b) {
        const int g0 = block_dof(e, b);
        for (int c = 0; c < 3; ++c) map[3 * b + c] = g0 + c;
    }
    return map;
}

std::pair<int, int> DofLayout::condensed_range(int e) const {
    const int base = element_base(e);
    return {base + 3 * (order - 1), base + 9 * order};
}

Eigen::VectorXd DofLayout::gather(int e, const Eigen::VectorXd& global) const {
    const std::vector<int> map = element_dofs(e);
    Eigen::VectorXd local(map.size());
    for (size_t i = 0; i < map.size(); ++i) local(i) = global(map[i]);
    return local;
}

void DofLayout::scatter_add(int e, const Eigen::VectorXd& local, Eigen::VectorXd& global) const {
    const std::vector<int> map = element_dofs(e);
    for (size_t i = 0; i < map.size(); ++i) global(map[i]) += local(i);
}

DofLayout dof_layout(const Mesh& mesh, int k, bool condensed) {
    if (mesh.order != k) throw InvalidMesh("requested order does not match the mesh");
    mesh.validate();

    DofLayout l;
    l.order = k;
    l.node_count = static_cast<int>(mesh.nodes.size());
    l.element_count = static_cast<int>(mesh.elements.size());
    l.total = 6 * l.node_count + 9 * k * l.element_count;
    l.condensed = condensed;
    l.connectivity.reserve(mesh.elements.size());
    for (const ElementDef& d : mesh.elements) l.connectivity.push_back(d.nodes);

    // anchor: lowest element ending at the node, else lowest starting there
    l.anchors.assign(l.node_count, NodeAnchor{});
    for (int e = 0; e < l.element_count; ++e) {
        NodeAnchor& a = l.anchors[l.connectivity[e][1]];
        if (a.element == -1) a = {e, 1};
    }
    for (int e = 0; e < l.element_count; ++e) {
        NodeAnchor& a = l.anchors[l.connectivity[e][0]];
        if (a.element == -1) a = {e, 0};
    }
    return l;
}

Eigen::VectorXd reference_state(const Mesh& mesh, const DofLayout& layout) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.total);
    for (int e = 0; e < layout.element_count; ++e) {
        const Eigen::VectorXd local = reference_dofs(mesh.elements[e]);
        const std::vector<int> map = layout.element_dofs(e);
        for (size_t i = 0; i < map.size(); ++i) x(map[i]) = local(i);
    }
    for (int i = 0; i < layout.node_count; ++i)
        x.segment<3>(layout.node_position(i)) = mesh.nodes[i].position;
    return x;
}

}  // namespace beamfe
