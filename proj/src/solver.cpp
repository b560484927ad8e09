#include "beamfe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include <Eigen/SparseLU>

#include "beamfe/detail/dual.hpp"
#include "beamfe/detail/rotation_kernels.hpp"
#include "beamfe/errors.hpp"

#include <limits>
#include "beamfe/legendre.hpp"

namespace beamfe {
namespace {

using detail::Dual2;

// safety factor on the backward-error noise floor of the residual test
constexpr double kNoiseSafety = 4.0;

struct NodalMoment {
    int node = -1;
    Vec3 moment = Vec3::Zero();
    MomentFrame frame = MomentFrame::kSpatial;
};

/// Loads with the phase factor folded into the vectors, so everything
/// downstream evaluates at unit factor.
struct ScaledLoads {
    std::vector<std::pair<int, Vec3>> forces;
    std::vector<NodalMoment> moments;
    std::vector<ElementLoad> element;
    std::vector<char> element_active;
};

void fold_case(const LoadCase& lc, double scale, const Mesh& mesh, ScaledLoads& out) {
    const int n_nodes = static_cast<int>(mesh.nodes.size());
    const int n_elem = static_cast<int>(mesh.elements.size());
    for (const PointForce& f : lc.forces) {
        if (f.node < 0 || f.node >= n_nodes) throw Error("point force references an unknown node");
        out.forces.emplace_back(f.node, scale * f.force);
    }
    for (const PointMoment& m : lc.moments) {
        if (m.node < 0 || m.node >= n_nodes) throw Error("point moment references an unknown node");
        out.moments.push_back({m.node, scale * m.moment, m.frame});
    }
    for (const DistributedLoad& d : lc.distributed) {
        if (d.element < 0 || d.element >= n_elem)
            throw Error("distributed load references an unknown element");
        ElementLoad& e = out.element[d.element];
        e.force_left += scale * d.load.force_left;
        e.force_right += scale * d.load.force_right;
        e.couple += scale * d.load.couple;
        out.element_active[d.element] = 1;
    }
}

ScaledLoads make_loads(const Mesh& mesh, double lambda, const LoadCase& ramped,
                       const LoadCase& held) {
    ScaledLoads out;
    out.element.resize(mesh.elements.size());
    out.element_active.assign(mesh.elements.size(), 0);
    fold_case(ramped, lambda, mesh, out);
    fold_case(held, 1.0, mesh, out);
    return out;
}

/// Adds the nodal load terms to the residual and (optionally) collects the
/// 3x3 vertex-rotation stiffness blocks of the moments. A moment m acting
/// on the node frame exp(psi_v) * Lambda0 does virtual work against the
/// spatial spin T(psi_v) dpsi_v, so its residual contribution is
/// -T^T(psi_v) m_s; for material moments m_s itself turns with psi_v.
void add_nodal_loads(const ScaledLoads& loads, const Mesh& mesh, const DofLayout& layout,
                     const Eigen::VectorXd& x, Eigen::VectorXd& g,
                     std::vector<std::pair<int, Mat3>>* moment_blocks) {
    for (const auto& [node, f] : loads.forces) g.segment<3>(layout.node_position(node)) -= f;

    using D3 = Dual2<3>;
    for (const NodalMoment& nm : loads.moments) {
        const int d0 = layout.node_rotation(nm.node);
        Vec3 fixed = nm.moment;
        if (nm.frame == MomentFrame::kMaterial) {
            const NodeAnchor a = layout.anchors[nm.node];
            const ElementDef& def = mesh.elements[a.element];
            fixed = rotate(a.end == 0 ? def.lambda0_left : def.lambda0_right, nm.moment);
        }
        D3 psi[3];
        for (int i = 0; i < 3; ++i) psi[i] = D3::seed(x(d0 + i), i);
        D3 ms[3] = {D3(fixed.x()), D3(fixed.y()), D3(fixed.z())};
        if (nm.frame == MomentFrame::kMaterial) {
            const auto q = detail::quat_exp(psi[0], psi[1], psi[2]);
            detail::quat_rotate(q, D3(fixed.x()), D3(fixed.y()), D3(fixed.z()), ms);
        }
        D3 out[3];
        detail::tangent_tr_apply(psi, ms, out);
        for (int i = 0; i < 3; ++i) g(d0 + i) -= detail::value(out[i]);
        if (moment_blocks) {
            Mat3 block;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) block(i, j) = -out[i].g[j];
            moment_blocks->emplace_back(d0, block);
        }
    }
}

struct SystemBlocks {
    Eigen::VectorXd g;        // full residual, loads included
    Eigen::VectorXd g_nodal;  // nodal-load part of g alone
    Eigen::VectorXd g_floor;  // backward-error scale per row: |K| |x| + |g|
    std::vector<Eigen::VectorXd> ge;
    std::vector<Eigen::MatrixXd> he;
    std::vector<std::pair<int, Mat3>> moment_blocks;
};

SystemBlocks compute_blocks(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& x,
                            const ScaledLoads& loads, IntegrationScheme scheme,
                            bool with_tangent) {
    SystemBlocks b;
    b.g = Eigen::VectorXd::Zero(layout.total);
    const int ne = layout.element_count;
    b.ge.resize(ne);
    if (with_tangent) {
        b.he.resize(ne);
        b.g_floor = Eigen::VectorXd::Zero(layout.total);
    }
    for (int e = 0; e < ne; ++e) {
        const ElementDef& def = mesh.elements[e];
        const Eigen::VectorXd xl = layout.gather(e, x);
        const ElementLoad* load = loads.element_active[e] ? &loads.element[e] : nullptr;
        if (with_tangent) {
            element_system(def, xl, 1.0, scheme, load, b.ge[e], b.he[e]);
            const Eigen::VectorXd row_scale = b.he[e].cwiseAbs() * xl.cwiseAbs();
            layout.scatter_add(e, row_scale, b.g_floor);
        } else {
            b.ge[e] = element_residual(def, xl, 1.0, scheme, load);
        }
        layout.scatter_add(e, b.ge[e], b.g);
    }
    b.g_nodal = Eigen::VectorXd::Zero(layout.total);
    add_nodal_loads(loads, mesh, layout, x, b.g_nodal, with_tangent ? &b.moment_blocks : nullptr);
    b.g += b.g_nodal;
    if (with_tangent) {
        for (const auto& [d0, block] : b.moment_blocks)
            b.g_floor.segment<3>(d0) += block.cwiseAbs() * x.segment<3>(d0).cwiseAbs();
        b.g_floor += b.g.cwiseAbs();
    }
    return b;
}

/// Replaces a rotation vector longer than pi by the shorter vector for the
/// same rotation.
void pull_back_chart(Eigen::Ref<Vec3> v) {
    double n = v.norm();
    while (n > std::numbers::pi) {
        v *= 1.0 - 2.0 * std::numbers::pi / n;
        n = v.norm();
    }
}

void rechart_state(const DofLayout& layout, const std::vector<BoundaryCondition>& bcs,
                   Eigen::VectorXd& x) {
    std::vector<char> rot_fixed(layout.node_count, 0);
    for (const BoundaryCondition& bc : bcs)
        if (bc.kind == Constraint::kRotation) rot_fixed[bc.node] = 1;
    for (int e = 0; e < layout.element_count; ++e)
        pull_back_chart(x.segment<3>(layout.block_dof(e, layout::rot_lo(layout.order))));
    for (int n = 0; n < layout.node_count; ++n)
        if (!rot_fixed[n]) pull_back_chart(x.segment<3>(layout.node_rotation(n)));
}

}  // namespace

Eigen::VectorXd assemble_residual(const Mesh& mesh, const DofLayout& layout,
                                  const Eigen::VectorXd& x, double lambda, const LoadCase& ramped,
                                  const LoadCase& held, IntegrationScheme scheme) {
    const ScaledLoads loads = make_loads(mesh, lambda, ramped, held);
    return compute_blocks(mesh, layout, x, loads, scheme, false).g;
}

Eigen::SparseMatrix<double> assemble_tangent(const Mesh& mesh, const DofLayout& layout,
                                             const Eigen::VectorXd& x, double lambda,
                                             const LoadCase& ramped, const LoadCase& held,
                                             IntegrationScheme scheme) {
    const ScaledLoads loads = make_loads(mesh, lambda, ramped, held);
    const SystemBlocks b = compute_blocks(mesh, layout, x, loads, scheme, true);
    std::vector<Eigen::Triplet<double>> trip;
    for (int e = 0; e < layout.element_count; ++e) {
        const std::vector<int> map = layout.element_dofs(e);
        for (size_t i = 0; i < map.size(); ++i)
            for (size_t j = 0; j < map.size(); ++j)
                trip.emplace_back(map[i], map[j], b.he[e](i, j));
    }
    for (const auto& [d0, block] : b.moment_blocks)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trip.emplace_back(d0 + i, d0 + j, block(i, j));
    Eigen::SparseMatrix<double> a(layout.total, layout.total);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

double total_potential(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& x,
                       double lambda, const LoadCase& ramped, const LoadCase& held,
                       IntegrationScheme scheme) {
    const ScaledLoads loads = make_loads(mesh, lambda, ramped, held);
    double energy = 0.0;
    for (int e = 0; e < layout.element_count; ++e) {
        const ElementLoad* load = loads.element_active[e] ? &loads.element[e] : nullptr;
        energy += element_energy(mesh.elements[e], layout.gather(e, x), scheme, load).total(1.0);
    }
    for (const auto& [node, f] : loads.forces)
        energy -= f.dot(x.segment<3>(layout.node_position(node)));
    return energy;
}

StepReport solve_step(const Mesh& mesh, const DofLayout& layout, Eigen::VectorXd& x,
                      double lambda, const LoadCase& ramped, const LoadCase& held,
                      const std::vector<BoundaryCondition>& bcs, const SolverOptions& opts) {
    if (x.size() != layout.total) throw Error("state size does not match the dof layout");
    const int total = layout.total;

    std::vector<char> fixed(total, 0);
    for (const BoundaryCondition& bc : bcs) {
        if (bc.node < 0 || bc.node >= layout.node_count)
            throw Error("boundary condition references an unknown node");
        const int d0 = bc.kind == Constraint::kPosition ? layout.node_position(bc.node)
                                                        : layout.node_rotation(bc.node);
        const Vec3 v = bc.value(lambda);
        for (int i = 0; i < 3; ++i) {
            x(d0 + i) = v(i);
            fixed[d0 + i] = 1;
        }
    }

    std::vector<char> internal(total, 0);
    if (opts.condense)
        for (int e = 0; e < layout.element_count; ++e) {
            const auto [c0, c1] = layout.condensed_range(e);
            std::fill(internal.begin() + c0, internal.begin() + c1, 1);
        }

    std::vector<int> reduced(total, -1);
    int n_reduced = 0;
    for (int d = 0; d < total; ++d)
        if (!fixed[d] && !internal[d]) reduced[d] = n_reduced++;

    const ScaledLoads loads = make_loads(mesh, lambda, ramped, held);
    const std::vector<int> internal_local = layout::condensed_dofs(layout.order);
    const double tol_r = opts.residual_tolerance * std::max(1.0, opts.load_scale);

    double dx_norm = 0.0;
    for (int iter = 0;; ++iter) {
        SystemBlocks b;
        try {
            b = compute_blocks(mesh, layout, x, loads, opts.scheme, true);
        } catch (const RelativeRotationTooLarge&) {
            throw NonConvergence("iterate left the admissible rotation chart", iter,
                                 std::numeric_limits<double>::quiet_NaN());
        }

        double rn2 = 0.0, floor2 = 0.0;
        for (int d = 0; d < total; ++d)
            if (!fixed[d]) {
                rn2 += b.g(d) * b.g(d);
                floor2 += b.g_floor(d) * b.g_floor(d);
            }
        const double rn = std::sqrt(rn2);
        // a residual below the roundoff of evaluating K x is equilibrium to
        // working precision, however tight the requested tolerance
        const double noise =
            kNoiseSafety * std::numeric_limits<double>::epsilon() * std::sqrt(floor2);
        const double tol_dx = opts.increment_tolerance * std::max(1.0, x.norm());
        if (rn <= std::max(tol_r, noise) && (iter == 0 || dx_norm <= tol_dx))
            return {lambda, iter, rn, iter == 0 ? 0.0 : dx_norm};
        if (iter >= opts.max_iterations)
            throw NonConvergence("newton did not reach the requested tolerance", iter, rn);

        std::vector<Eigen::Triplet<double>> trip;
        // seed the reduced right-hand side with the nodal-load part; the
        // element parts follow (Schur-reduced when condensing)
        Eigen::VectorXd gr = Eigen::VectorXd::Zero(n_reduced);
        for (int d = 0; d < total; ++d)
            if (reduced[d] >= 0) gr(reduced[d]) = b.g_nodal(d);
        std::vector<Condensed> cond(opts.condense ? layout.element_count : 0);

        try {
        for (int e = 0; e < layout.element_count; ++e) {
            const std::vector<int> map = layout.element_dofs(e);
            if (!opts.condense) {
                for (size_t i = 0; i < map.size(); ++i) {
                    const int gi = reduced[map[i]];
                    if (gi < 0) continue;
                    gr(gi) += b.ge[e](i);
                    for (size_t j = 0; j < map.size(); ++j) {
                        const int gj = reduced[map[j]];
                        if (gj >= 0) trip.emplace_back(gi, gj, b.he[e](i, j));
                    }
                }
            } else {
                cond[e] = condense(b.he[e], b.ge[e], internal_local);
                const std::vector<int>& ret = cond[e].retained;
                for (size_t i = 0; i < ret.size(); ++i) {
                    const int gi = reduced[map[ret[i]]];
                    if (gi < 0) continue;
                    gr(gi) += cond[e].residual(i);
                    for (size_t j = 0; j < ret.size(); ++j) {
                        const int gj = reduced[map[ret[j]]];
                        if (gj >= 0) trip.emplace_back(gi, gj, cond[e].tangent(i, j));
                    }
                }
            }
        }
        } catch (const SingularCondensationBlock&) {
            // a degenerate internal block at a trial iterate is a failed
            // step, not a structural defect: let the continuation bisect
            throw NonConvergence("condensed element block is singular at this iterate", iter, rn);
        }
        for (const auto& [d0, block] : b.moment_blocks)
            for (int i = 0; i < 3; ++i) {
                const int gi = reduced[d0 + i];
                if (gi < 0) continue;
                for (int j = 0; j < 3; ++j) {
                    const int gj = reduced[d0 + j];
                    if (gj >= 0) trip.emplace_back(gi, gj, block(i, j));
                }
            }

        Eigen::SparseMatrix<double> a(n_reduced, n_reduced);
        a.setFromTriplets(trip.begin(), trip.end());
        a.makeCompressed();

        // symmetric Jacobi equilibration: dof classes carry very different
        // units, and stiff sections spread the diagonal over many decades
        Eigen::VectorXd eq(n_reduced);
        const Eigen::VectorXd diag = a.diagonal();
        for (int i = 0; i < n_reduced; ++i) {
            const double v = std::abs(diag(i));
            eq(i) = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
        }
        const Eigen::SparseMatrix<double> a_eq = eq.asDiagonal() * a * eq.asDiagonal();

        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a_eq);
        if (lu.info() != Eigen::Success)
            throw NonConvergence("tangent factorization failed at this iterate", iter, rn);
        const Eigen::VectorXd dr_eq = lu.solve(-(eq.asDiagonal() * gr));
        if (lu.info() != Eigen::Success)
            throw NonConvergence("tangent solve failed at this iterate", iter, rn);
        const Eigen::VectorXd dr = eq.asDiagonal() * dr_eq;

        Eigen::VectorXd dx = Eigen::VectorXd::Zero(total);
        for (int d = 0; d < total; ++d)
            if (reduced[d] >= 0) dx(d) = dr(reduced[d]);

        if (opts.condense)
            for (int e = 0; e < layout.element_count; ++e) {
                const std::vector<int> map = layout.element_dofs(e);
                const std::vector<int>& ret = cond[e].retained;
                Eigen::VectorXd dret(ret.size());
                for (size_t i = 0; i < ret.size(); ++i) dret(i) = dx(map[ret[i]]);
                const Eigen::VectorXd dc = cond[e].recover_rhs + cond[e].recover_matrix * dret;
                for (size_t i = 0; i < internal_local.size(); ++i)
                    dx(map[internal_local[i]]) = dc(i);
            }

        x += dx;
        dx_norm = dx.norm();
    }
}

RunReport run_continuation(const Mesh& mesh, const DofLayout& layout, Eigen::VectorXd& x,
                           const std::vector<Phase>& phases, const SolverOptions& opts,
                           const StepObserver& observer) {
    RunReport report;
    for (size_t p = 0; p < phases.size(); ++p) {
        const Phase& phase = phases[p];
        if (phase.steps < 1) throw Error("phase must have at least one step");
        const double nominal = 1.0 / phase.steps;
        double lambda = 0.0;
        double dl = nominal;
        int depth = 0;
        while (lambda < 1.0 - 1e-12) {
            const double target = std::min(lambda + dl, 1.0);
            const Eigen::VectorXd backup = x;
            try {
                const StepReport step =
                    solve_step(mesh, layout, x, target, phase.ramped, phase.held, phase.bcs, opts);
                lambda = target;
                report.total_steps += 1;
                report.total_iterations += step.iterations;
                report.steps.push_back(step);
                rechart_state(layout, phase.bcs, x);
                if (depth > 0) {
                    dl = std::min(2.0 * dl, nominal);
                    --depth;
                }
                if (observer) observer(static_cast<int>(p), step, x);
            } catch (const NonConvergence&) {
                x = backup;
                ++depth;
                dl *= 0.5;
                if (depth > opts.max_bisection_depth) throw;
            }
        }
    }
    return report;
}

double error_l2_position(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& x,
                         const std::function<Vec3(double)>& reference_position,
                         double normalization) {
    if (!reference_position) throw Error("reference position function is empty");
    if (!(normalization > 0.0)) throw Error("normalization must be positive");
    const QuadratureRule& rule = gauss_rule(2 * mesh.order + 2);
    double acc = 0.0;
    double s0 = 0.0;
    double length = 0.0;
    for (int e = 0; e < layout.element_count; ++e) {
        const ElementDef& def = mesh.elements[e];
        const Eigen::VectorXd xl = layout.gather(e, x);
        const double j = def.jacobian;
        for (int q = 0; q < rule.points.size(); ++q) {
            const double s = s0 + j * (rule.points(q) + 1.0);
            const Vec3 r = centerline_point(def, xl, rule.points(q));
            acc += rule.weights(q) * j * (r - reference_position(s)).squaredNorm();
        }
        s0 += 2.0 * j;
        length += 2.0 * j;
    }
    return std::sqrt(acc / length) / normalization;
}

double convergence_rate(const std::vector<double>& h, const std::vector<double>& errors,
                        double floor) {
    if (h.size() != errors.size()) throw Error("mismatched sample counts");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(errors[i] > 0.0)) throw Error("samples must be positive");
        if (errors[i] < floor) continue;
        lx.push_back(std::log(h[i]));
        ly.push_back(std::log(errors[i]));
    }
    if (lx.size() < 2) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double complementary_curvature_energy(const Mesh& mesh, const DofLayout& layout,
                                      const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (int e = 0; e < layout.element_count; ++e)
        acc += element_energy(mesh.elements[e], layout.gather(e, x)).complementary_kappa;
    return acc;
}

}  // namespace beamfe
