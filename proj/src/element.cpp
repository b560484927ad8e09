#include "beamfe/element.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "beamfe/detail/dual.hpp"
#include "beamfe/detail/rotation_kernels.hpp"

namespace beamfe {

namespace layout {

std::vector<int> condensed_dofs(int k) {
    std::vector<int> idx;
    idx.reserve(6 * k + 3);
    for (int i = 3 * k + 3; i < 9 * k + 6; ++i) idx.push_back(i);
    return idx;
}

}  // namespace layout

namespace {

using detail::Dual2;
using detail::Quat;
using detail::quat_conj;
using detail::quat_exp;
using detail::quat_log_pos;
using detail::quat_mul;
using detail::quat_rotate_inv;
using detail::tangent_tr_apply;
using detail::value;

template <class S>
Quat<S> promote(const Quat<double>& q) {
    return {S(q.w), S(q.x), S(q.y), S(q.z)};
}

// Basis data of an order-k element at one coordinate xi: Legendre values
// and xi-derivatives up to degree k, plus the value/derivative weights of
// the k+1 position blocks (end shapes and bubbles).
struct BasisAt {
    double xi = 0.0;
    Eigen::VectorXd P, dP;
    Eigen::VectorXd wv, wd;
};

BasisAt basis_at(int k, double xi) {
    BasisAt b;
    b.xi = xi;
    const LegendreEval lb = legendre_basis(k, xi);
    b.P = lb.value;
    b.dP = lb.deriv;
    b.wv.resize(k + 1);
    b.wd.resize(k + 1);
    b.wv(0) = 0.5 * (1.0 - xi);
    b.wv(1) = 0.5 * (1.0 + xi);
    b.wd(0) = -0.5;
    b.wd(1) = 0.5;
    for (int j = 2; j <= k; ++j) {
        b.wv(j) = b.P(j) - b.P(j - 2);
        b.wd(j) = b.dP(j) - b.dP(j - 2);
    }
    return b;
}

Vec3 block_of(const Eigen::VectorXd& x, int block) { return x.segment<3>(3 * block); }

Vec3 eval_r_dxi(const Eigen::VectorXd& x, const BasisAt& b, int k) {
    Vec3 v = Vec3::Zero();
    for (int j = 0; j <= k; ++j) v += b.wd(j) * block_of(x, j);
    return v;
}

Vec3 eval_r(const Eigen::VectorXd& x, const BasisAt& b, int k) {
    Vec3 v = Vec3::Zero();
    for (int j = 0; j <= k; ++j) v += b.wv(j) * block_of(x, j);
    return v;
}

Vec3 eval_moment(const Eigen::VectorXd& x, const BasisAt& b, int k) {
    Vec3 v = Vec3::Zero();
    for (int j = 0; j <= k; ++j) v += b.P(j) * block_of(x, layout::moment(k, j));
    return v;
}

Vec3 eval_psi_ho(const Eigen::VectorXd& x, const BasisAt& b, int k) {
    Vec3 v = Vec3::Zero();
    for (int j = 1; j < k; ++j) v += b.P(j) * block_of(x, layout::rot_ho(k, j));
    return v;
}

Vec3 eval_psi_ho_dxi(const Eigen::VectorXd& x, const BasisAt& b, int k) {
    Vec3 v = Vec3::Zero();
    for (int j = 1; j < k; ++j) v += b.dP(j) * block_of(x, layout::rot_ho(k, j));
    return v;
}

void guard_psi_ho(const Vec3& psi_ho, double xi) {
    if (psi_ho.norm() >= std::numbers::pi)
        throw RelativeRotationTooLarge("element rotation field reached pi at xi = " +
                                       std::to_string(xi));
}

// --- quadrature-point densities, shared between the plain-double energy
// --- path and the Dual2 residual/tangent path -------------------------

template <class S>
S gamma_density(const S rp[3], const S plo[3], const S pho[3], const CrossSection& cs) {
    const Quat<S> qlo = quat_exp(plo[0], plo[1], plo[2]);
    const Quat<S> qho = quat_exp(pho[0], pho[1], pho[2]);
    S v1[3], g[3];
    quat_rotate_inv(qlo, rp[0], rp[1], rp[2], v1);
    quat_rotate_inv(qho, v1[0], v1[1], v1[2], g);
    g[0] = g[0] - 1.0;
    return 0.5 * (cs.EA * g[0] * g[0] + cs.GA2 * g[1] * g[1] + cs.GA3 * g[2] * g[2]);
}

// -1/2 M . Ck^-1 . M + kappa . M with kappa = T^T(u) v / J - kappa0
template <class S>
S moment_density(const S u[3], const S v[3], const S m[3], double inv_j, const Vec3& kappa0,
                 const Vec3& ckinv) {
    S kap[3];
    tangent_tr_apply(u, v, kap);
    S e = -0.5 * (ckinv[0] * m[0] * m[0] + ckinv[1] * m[1] * m[1] + ckinv[2] * m[2] * m[2]);
    for (int i = 0; i < 3; ++i) e = e + (kap[i] * inv_j - kappa0[i]) * m[i];
    return e;
}

// Rotation gap log((exp(plo) exp(pho))^T exp(pv) q0), principal branch.
template <class S>
void gap_angle(const S plo[3], const S pho[3], const S pv[3], const Quat<double>& q0, S ang[3]) {
    const Quat<S> qe =
        quat_mul(quat_exp(plo[0], plo[1], plo[2]), quat_exp(pho[0], pho[1], pho[2]));
    const Quat<S> qv = quat_mul(quat_exp(pv[0], pv[1], pv[2]), promote<S>(q0));
    Quat<S> qrel = quat_mul(quat_conj(qe), qv);
    if (value(qrel.w) < 0.0) {
        qrel.w = -qrel.w;
        qrel.x = -qrel.x;
        qrel.y = -qrel.y;
        qrel.z = -qrel.z;
    }
    quat_log_pos(qrel, ang);
}

// --- scatter of per-term derivatives into the element system ----------

struct Target {
    int block;
    double weight;
};
using Targets = std::vector<Target>;

// The N dual directions of a term are grouped into N/3 intermediate
// 3-vectors; each group maps linearly onto element blocks via its target
// weights. Gradient and Hessian contributions distribute accordingly.
template <int N>
void scatter_sym(const Dual2<N>& term, double scale, const std::array<Targets, N / 3>& groups,
                 Eigen::VectorXd* g, Eigen::MatrixXd* h) {
    constexpr int kGroups = N / 3;
    if (g) {
        for (int gi = 0; gi < kGroups; ++gi)
            for (const Target& t : groups[gi])
                for (int a = 0; a < 3; ++a)
                    (*g)(3 * t.block + a) += scale * t.weight * term.g[3 * gi + a];
    }
    if (h) {
        Eigen::Matrix<double, N, N> full;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j <= i; ++j) {
                const double v = term.h[Dual2<N>::packed(i, j)];
                full(i, j) = v;
                full(j, i) = v;
            }
        for (int gi = 0; gi < kGroups; ++gi)
            for (int gj = 0; gj < kGroups; ++gj) {
                if (groups[gi].empty() || groups[gj].empty()) continue;
                const auto sub = full.template block<3, 3>(3 * gi, 3 * gj);
                for (const Target& ta : groups[gi])
                    for (const Target& tb : groups[gj])
                        h->block<3, 3>(3 * ta.block, 3 * tb.block) +=
                            (scale * ta.weight * tb.weight) * sub;
            }
    }
}

void check_dofs(const ElementDef& def, const Eigen::VectorXd& x) {
    if (x.size() != layout::dof_count(def.order))
        throw Error("element dof vector has size " + std::to_string(x.size()) + ", expected " +
                    std::to_string(layout::dof_count(def.order)));
}

Vec3 force_at(const ElementLoad& load, double xi) {
    return 0.5 * (1.0 - xi) * load.force_left + 0.5 * (1.0 + xi) * load.force_right;
}

// Residual and (optionally) tangent of the element energy. Conservative
// terms come from one Dual2 pass per quadrature point; the distributed
// couple, having no potential, contributes its virtual-work residual and
// a nonsymmetric Jacobian directly.
void accumulate(const ElementDef& def, const Eigen::VectorXd& x, double lambda,
                IntegrationScheme scheme, const ElementLoad* load, Eigen::VectorXd* g,
                Eigen::MatrixXd* h) {
    check_dofs(def, x);
    const int k = def.order;
    const int n = layout::dof_count(k);
    const double j_det = def.jacobian;
    if (g) g->setZero(n);
    if (h) h->setZero(n, n);

    const QuadraturePair rules = quadrature_rules(k);
    const QuadratureRule& rule_gamma =
        (scheme == IntegrationScheme::kReduced) ? rules.reduced : rules.full;
    const QuadratureRule& rule_full = rules.full;

    const Vec3 plo = block_of(x, layout::rot_lo(k));
    const Vec3 ckinv = def.section.c_kappa_inv();

    // force-strain term, integrated with the scheme's gamma rule
    for (int q = 0; q < rule_gamma.points.size(); ++q) {
        const double xi = rule_gamma.points(q);
        const BasisAt b = basis_at(k, xi);
        const Vec3 rp = eval_r_dxi(x, b, k) / j_det;
        const Vec3 pho = eval_psi_ho(x, b, k);
        guard_psi_ho(pho, xi);

        using D = Dual2<9>;
        D rp_d[3], plo_d[3], pho_d[3];
        for (int i = 0; i < 3; ++i) {
            rp_d[i] = D::seed(rp[i], i);
            plo_d[i] = D::seed(plo[i], 3 + i);
            pho_d[i] = D::seed(pho[i], 6 + i);
        }
        const D e = gamma_density(rp_d, plo_d, pho_d, def.section);

        std::array<Targets, 3> groups;
        for (int j = 0; j <= k; ++j)
            if (b.wd(j) != 0.0) groups[0].push_back({j, b.wd(j) / j_det});
        groups[1].push_back({layout::rot_lo(k), 1.0});
        for (int j = 1; j < k; ++j) groups[2].push_back({layout::rot_ho(k, j), b.P(j)});
        scatter_sym(e, j_det * rule_gamma.weights(q), groups, g, h);
    }

    // dual moment term, always integrated with the full rule
    for (int q = 0; q < rule_full.points.size(); ++q) {
        const double xi = rule_full.points(q);
        const BasisAt b = basis_at(k, xi);
        const Vec3 u = eval_psi_ho(x, b, k);
        const Vec3 v = eval_psi_ho_dxi(x, b, k);
        const Vec3 m = eval_moment(x, b, k);
        guard_psi_ho(u, xi);

        using D = Dual2<9>;
        D u_d[3], v_d[3], m_d[3];
        for (int i = 0; i < 3; ++i) {
            u_d[i] = D::seed(u[i], i);
            v_d[i] = D::seed(v[i], 3 + i);
            m_d[i] = D::seed(m[i], 6 + i);
        }
        const D e = moment_density(u_d, v_d, m_d, 1.0 / j_det, def.kappa0_full.col(q), ckinv);

        std::array<Targets, 3> groups;
        for (int j = 1; j < k; ++j) {
            groups[0].push_back({layout::rot_ho(k, j), b.P(j)});
            groups[1].push_back({layout::rot_ho(k, j), b.dP(j)});
        }
        for (int j = 0; j <= k; ++j) groups[2].push_back({layout::moment(k, j), b.P(j)});
        scatter_sym(e, j_det * rule_full.weights(q), groups, g, h);
    }

    // end jumps: sign +1 at the right end, -1 at the left end
    for (int end = 0; end < 2; ++end) {
        const double xi = end == 0 ? -1.0 : 1.0;
        const double sign = end == 0 ? -1.0 : 1.0;
        const Rotation& lambda0 = end == 0 ? def.lambda0_left : def.lambda0_right;
        const int vertex_block = end == 0 ? layout::vertex_left(k) : layout::vertex_right(k);
        const BasisAt b = basis_at(k, xi);
        const Vec3 pho = eval_psi_ho(x, b, k);
        guard_psi_ho(pho, xi);
        const Vec3 pv = block_of(x, vertex_block);
        const Vec3 m = eval_moment(x, b, k);

        using D = Dual2<12>;
        D plo_d[3], pho_d[3], pv_d[3], m_d[3];
        for (int i = 0; i < 3; ++i) {
            plo_d[i] = D::seed(plo[i], i);
            pho_d[i] = D::seed(pho[i], 3 + i);
            pv_d[i] = D::seed(pv[i], 6 + i);
            m_d[i] = D::seed(m[i], 9 + i);
        }
        D ang[3];
        gap_angle(plo_d, pho_d, pv_d, lambda0.raw(), ang);
        const D e = ang[0] * m_d[0] + ang[1] * m_d[1] + ang[2] * m_d[2];

        std::array<Targets, 4> groups;
        groups[0].push_back({layout::rot_lo(k), 1.0});
        for (int j = 1; j < k; ++j) groups[1].push_back({layout::rot_ho(k, j), b.P(j)});
        groups[2].push_back({vertex_block, 1.0});
        for (int j = 0; j <= k; ++j) groups[3].push_back({layout::moment(k, j), b.P(j)});
        scatter_sym(e, sign, groups, g, h);
    }

    if (!load) return;

    // dead distributed force: linear potential, residual only
    if (load->has_force() && g) {
        for (int q = 0; q < rule_full.points.size(); ++q) {
            const double xi = rule_full.points(q);
            const BasisAt b = basis_at(k, xi);
            const Vec3 f = lambda * j_det * rule_full.weights(q) * force_at(*load, xi);
            for (int j = 0; j <= k; ++j) g->segment<3>(3 * j) -= b.wv(j) * f;
        }
    }

    // distributed spatial couple (experimental): virtual work
    // c . (T(psi_lo) dpsi_lo + exp(psi_lo) T(psi_ho) dpsi_ho) per length
    if (load->has_couple()) {
        const Vec3 c = load->couple;
        {
            using D = Dual2<3>;
            D p[3], cd[3], out[3];
            for (int i = 0; i < 3; ++i) {
                p[i] = D::seed(plo[i], i);
                cd[i] = c[i];
            }
            tangent_tr_apply(p, cd, out);  // T^T(psi_lo) c
            const int r0 = 3 * layout::rot_lo(k);
            for (int i = 0; i < 3; ++i) {
                if (g) (*g)(r0 + i) -= lambda * 2.0 * j_det * out[i].v;
                if (h)
                    for (int mth = 0; mth < 3; ++mth)
                        (*h)(r0 + i, r0 + mth) -= lambda * 2.0 * j_det * out[i].g[mth];
            }
        }
        for (int q = 0; q < rule_full.points.size() && k > 1; ++q) {
            const double xi = rule_full.points(q);
            const BasisAt b = basis_at(k, xi);
            const Vec3 pho = eval_psi_ho(x, b, k);
            using D = Dual2<6>;
            D plo_d[3], pho_d[3], cl[3], out[3];
            for (int i = 0; i < 3; ++i) {
                plo_d[i] = D::seed(plo[i], i);
                pho_d[i] = D::seed(pho[i], 3 + i);
            }
            const Quat<D> qlo = quat_exp(plo_d[0], plo_d[1], plo_d[2]);
            quat_rotate_inv(qlo, D(c[0]), D(c[1]), D(c[2]), cl);
            tangent_tr_apply(pho_d, cl, out);  // T^T(psi_ho) exp(psi_lo)^T c
            const double wq = lambda * j_det * rule_full.weights(q);
            for (int j = 1; j < k; ++j) {
                const int row = 3 * layout::rot_ho(k, j);
                const double pj = wq * b.P(j);
                for (int i = 0; i < 3; ++i) {
                    if (g) (*g)(row + i) -= pj * out[i].v;
                    if (h) {
                        const int clo = 3 * layout::rot_lo(k);
                        for (int mth = 0; mth < 3; ++mth)
                            (*h)(row + i, clo + mth) -= pj * out[i].g[mth];
                        for (int jj = 1; jj < k; ++jj) {
                            const int cho = 3 * layout::rot_ho(k, jj);
                            for (int mth = 0; mth < 3; ++mth)
                                (*h)(row + i, cho + mth) -= pj * b.P(jj) * out[i].g[3 + mth];
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

void ElementDef::finalize() {
    if (order < 1) throw InvalidMesh("element order must be at least 1");
    if (!(jacobian > 0.0)) throw InvalidMesh("element length must be positive");
    if (r0.cols() != order + 1)
        throw InvalidMesh("reference centerline must have order+1 coefficient columns");
    if (psi0_ho.cols() != order - 1)
        throw InvalidMesh("reference rotation field must have order-1 coefficient columns");
    section.validate();

    lambda0_left = local_rotation(psi0_lo, psi0_ho, -1.0);
    lambda0_right = local_rotation(psi0_lo, psi0_ho, 1.0);

    const QuadraturePair rules = quadrature_rules(order);
    const int nq = static_cast<int>(rules.full.points.size());
    kappa0_full.resize(3, nq);
    for (int q = 0; q < nq; ++q) {
        const BasisAt b = basis_at(order, rules.full.points(q));
        Vec3 u = Vec3::Zero(), v = Vec3::Zero();
        for (int j = 1; j < order; ++j) {
            u += b.P(j) * psi0_ho.col(j - 1);
            v += b.dP(j) * psi0_ho.col(j - 1);
        }
        kappa0_full.col(q) = curvature_local(u, v / jacobian, Vec3::Zero(), Vec3::Zero());
    }
}

Rotation local_rotation(const Vec3& psi_lo, const Eigen::Matrix3Xd& psi_ho_coeffs, double xi) {
    Vec3 ho = Vec3::Zero();
    const int c = static_cast<int>(psi_ho_coeffs.cols());
    if (c > 0) {
        const LegendreEval lb = legendre_basis(c, xi);
        for (int j = 1; j <= c; ++j) ho += lb.value(j) * psi_ho_coeffs.col(j - 1);
    }
    guard_psi_ho(ho, xi);
    return compose(exp_rotvec(psi_lo), exp_rotvec(ho));
}

double interface_jump(const Rotation& lambda_e_end, const Vec3& psi_v, const Rotation& lambda0_end,
                      const Vec3& m_end, double sign) {
    const Rotation vertex = compose(exp_rotvec(psi_v), lambda0_end);
    return sign * relative_rotvec(lambda_e_end, vertex).dot(m_end);
}

Eigen::VectorXd reference_dofs(const ElementDef& def) {
    const int k = def.order;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(layout::dof_count(k));
    for (int j = 0; j <= k; ++j) x.segment<3>(3 * j) = def.r0.col(j);
    x.segment<3>(3 * layout::rot_lo(k)) = def.psi0_lo;
    for (int j = 1; j < k; ++j) x.segment<3>(3 * layout::rot_ho(k, j)) = def.psi0_ho.col(j - 1);
    return x;
}

Vec3 centerline_point(const ElementDef& def, const Eigen::VectorXd& x, double xi) {
    check_dofs(def, x);
    return eval_r(x, basis_at(def.order, xi), def.order);
}

ElementEnergy element_energy(const ElementDef& def, const Eigen::VectorXd& x,
                             IntegrationScheme scheme, const ElementLoad* load) {
    check_dofs(def, x);
    const int k = def.order;
    const double j_det = def.jacobian;
    const QuadraturePair rules = quadrature_rules(k);
    const QuadratureRule& rule_gamma =
        (scheme == IntegrationScheme::kReduced) ? rules.reduced : rules.full;
    const QuadratureRule& rule_full = rules.full;
    const Vec3 plo = block_of(x, layout::rot_lo(k));
    const Vec3 ckinv = def.section.c_kappa_inv();

    ElementEnergy out;
    for (int q = 0; q < rule_gamma.points.size(); ++q) {
        const double xi = rule_gamma.points(q);
        const BasisAt b = basis_at(k, xi);
        const Vec3 rp = eval_r_dxi(x, b, k) / j_det;
        const Vec3 pho = eval_psi_ho(x, b, k);
        guard_psi_ho(pho, xi);
        const double rpv[3] = {rp[0], rp[1], rp[2]};
        const double plov[3] = {plo[0], plo[1], plo[2]};
        const double phov[3] = {pho[0], pho[1], pho[2]};
        out.gamma += j_det * rule_gamma.weights(q) * gamma_density(rpv, plov, phov, def.section);
    }
    for (int q = 0; q < rule_full.points.size(); ++q) {
        const double xi = rule_full.points(q);
        const BasisAt b = basis_at(k, xi);
        const Vec3 u = eval_psi_ho(x, b, k);
        const Vec3 v = eval_psi_ho_dxi(x, b, k);
        const Vec3 m = eval_moment(x, b, k);
        guard_psi_ho(u, xi);
        const double uv[3] = {u[0], u[1], u[2]};
        const double vv[3] = {v[0], v[1], v[2]};
        const double mv[3] = {m[0], m[1], m[2]};
        const double w = j_det * rule_full.weights(q);
        out.kappa_dual += w * moment_density(uv, vv, mv, 1.0 / j_det, def.kappa0_full.col(q), ckinv);
        out.complementary_kappa += w * m.dot(ckinv.cwiseProduct(m));
        if (load && load->has_force()) out.load_work += w * force_at(*load, xi).dot(eval_r(x, b, k));
    }
    for (int end = 0; end < 2; ++end) {
        const double xi = end == 0 ? -1.0 : 1.0;
        const double sign = end == 0 ? -1.0 : 1.0;
        const Rotation& lambda0 = end == 0 ? def.lambda0_left : def.lambda0_right;
        const int vertex_block = end == 0 ? layout::vertex_left(k) : layout::vertex_right(k);
        const BasisAt b = basis_at(k, xi);
        const Vec3 pho = eval_psi_ho(x, b, k);
        guard_psi_ho(pho, xi);
        const Vec3 pv = block_of(x, vertex_block);
        const Vec3 m = eval_moment(x, b, k);
        const double plov[3] = {plo[0], plo[1], plo[2]};
        const double phov[3] = {pho[0], pho[1], pho[2]};
        const double pvv[3] = {pv[0], pv[1], pv[2]};
        double ang[3];
        gap_angle(plov, phov, pvv, lambda0.raw(), ang);
        const Vec3 angle(ang[0], ang[1], ang[2]);
        out.jump += sign * angle.dot(m);
        (end == 0 ? out.jump_angle_left : out.jump_angle_right) = angle;
    }
    return out;
}

Eigen::VectorXd element_residual(const ElementDef& def, const Eigen::VectorXd& x, double lambda,
                                 IntegrationScheme scheme, const ElementLoad* load) {
    Eigen::VectorXd g;
    accumulate(def, x, lambda, scheme, load, &g, nullptr);
    return g;
}

Eigen::MatrixXd element_tangent(const ElementDef& def, const Eigen::VectorXd& x, double lambda,
                                IntegrationScheme scheme, const ElementLoad* load) {
    Eigen::MatrixXd h;
    accumulate(def, x, lambda, scheme, load, nullptr, &h);
    return h;
}

void element_system(const ElementDef& def, const Eigen::VectorXd& x, double lambda,
                    IntegrationScheme scheme, const ElementLoad* load, Eigen::VectorXd& residual,
                    Eigen::MatrixXd& tangent) {
    accumulate(def, x, lambda, scheme, load, &residual, &tangent);
}

Condensed condense(const Eigen::MatrixXd& tangent, const Eigen::VectorXd& residual,
                   const std::vector<int>& condensed_indices) {
    const int n = static_cast<int>(tangent.rows());
    if (tangent.cols() != n || residual.size() != n)
        throw Error("condense: system dimensions do not agree");

    std::vector<char> is_condensed(n, 0);
    for (int i : condensed_indices) {
        if (i < 0 || i >= n) throw Error("condense: index out of range");
        if (is_condensed[i]) throw Error("condense: repeated index");
        is_condensed[i] = 1;
    }

    Condensed out;
    out.condensed.reserve(condensed_indices.size());
    out.retained.reserve(n - condensed_indices.size());
    for (int i = 0; i < n; ++i) (is_condensed[i] ? out.condensed : out.retained).push_back(i);

    const int nc = static_cast<int>(out.condensed.size());
    const int nr = static_cast<int>(out.retained.size());
    Eigen::MatrixXd kcc(nc, nc), kcr(nc, nr), krc(nr, nc);
    Eigen::VectorXd gc(nc), gr(nr);
    for (int a = 0; a < nc; ++a) {
        gc(a) = residual(out.condensed[a]);
        for (int bb = 0; bb < nc; ++bb) kcc(a, bb) = tangent(out.condensed[a], out.condensed[bb]);
        for (int bb = 0; bb < nr; ++bb) kcr(a, bb) = tangent(out.condensed[a], out.retained[bb]);
    }
    for (int a = 0; a < nr; ++a) {
        gr(a) = residual(out.retained[a]);
        for (int bb = 0; bb < nc; ++bb) krc(a, bb) = tangent(out.retained[a], out.condensed[bb]);
    }

    // the internal block mixes compliance rows (1/C) with stiffness rows
    // (C * geometry); equilibrate so the rank test judges shape, not units
    Eigen::VectorXd scale(nc);
    for (int a = 0; a < nc; ++a) {
        const double diag = std::abs(kcc(a, a));
        scale(a) = diag > 0.0 ? 1.0 / std::sqrt(diag) : 1.0;
    }
    const Eigen::MatrixXd kcc_eq = scale.asDiagonal() * kcc * scale.asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kcc_eq);
    if (!lu.isInvertible())
        throw SingularCondensationBlock("condensed element block is singular");
    const Eigen::MatrixXd x_mat = scale.asDiagonal() * lu.solve(scale.asDiagonal() * kcr);
    const Eigen::VectorXd y = scale.asDiagonal() * lu.solve(scale.asDiagonal() * gc);

    out.tangent.resize(nr, nr);
    for (int a = 0; a < nr; ++a)
        for (int bb = 0; bb < nr; ++bb) out.tangent(a, bb) = tangent(out.retained[a], out.retained[bb]);
    out.tangent -= krc * x_mat;
    out.residual = gr - krc * y;
    out.recover_matrix = -x_mat;
    out.recover_rhs = -y;
    return out;
}

}  // namespace beamfe
