#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "beamfe/constitutive.hpp"
#include "beamfe/errors.hpp"
#include "beamfe/legendre.hpp"
#include "beamfe/so3.hpp"

namespace beamfe {

/// Quadrature applied to the force-strain term. The moment term is always
/// integrated with the full rule; only the gamma term is under-integrated
/// in the reduced scheme.
enum class IntegrationScheme { kReduced, kFull };

/// Local degree-of-freedom layout of a mixed beam element of order k.
///
/// All unknowns come in 3-vector blocks, ordered as
///   [0]          position at the left end
///   [1]          position at the right end
///   [2 .. k]     internal position bubbles b_j, shapes P_j - P_{j-2}
///   [k+1 .. 2k+1]   moment coefficients M_j on Legendre P_0 .. P_k
///   [2k+2]       element rotation vector psi_lo (constant part)
///   [2k+3 .. 3k+1]  rotation coefficients psi_ho_j on P_1 .. P_{k-1}
///   [3k+2]       vertex rotation vector of the left node
///   [3k+3]       vertex rotation vector of the right node
/// for 3k+4 blocks and 9k+12 scalar dofs in total.
namespace layout {

inline int block_count(int k) { return 3 * k + 4; }
inline int dof_count(int k) { return 9 * k + 12; }

inline int pos_left() { return 0; }
inline int pos_right() { return 1; }
inline int bubble(int j) { return j; }                    // j in [2, k]
inline int moment(int k, int j) { return k + 1 + j; }     // j in [0, k]
inline int rot_lo(int k) { return 2 * k + 2; }
inline int rot_ho(int k, int j) { return 2 * k + 2 + j; }  // j in [1, k-1]
inline int vertex_left(int k) { return 3 * k + 2; }
inline int vertex_right(int k) { return 3 * k + 3; }

/// Element-internal dofs eliminated by static condensation: the moment
/// coefficients, psi_lo, and the psi_ho coefficients. They form the
/// contiguous scalar range [3k+3, 9k+6).
std::vector<int> condensed_dofs(int k);

}  // namespace layout

/// Geometry, reference state, and section of one mixed beam element.
///
/// The centerline r(xi) is the degree-k polynomial spanned by the two end
/// positions and the bubbles; the element rotation field is
/// Lambda(xi) = exp(psi_lo) exp(psi_ho(xi)) with psi_ho of degree k-1 and
/// zero mean. Dof values hold total quantities, so the reference state is
/// x = reference_dofs(def), not zero.
struct ElementDef {
    int order = 1;                   // polynomial order k >= 1
    std::array<int, 2> nodes{0, 1};  // global vertex ids (left, right)
    double jacobian = 0.5;           // ds/dxi, half the element arc length
    CrossSection section;

    Eigen::Matrix3Xd r0;       // 3 x (k+1): left end, right end, bubbles
    Vec3 psi0_lo = Vec3::Zero();
    Eigen::Matrix3Xd psi0_ho;  // 3 x (k-1): coefficients on P_1 .. P_{k-1}

    // Derived reference data, filled by finalize(): the discrete reference
    // frames at the element ends (which the vertex rotations are measured
    // against, making the reference state jump-free by construction) and
    // the reference curvature at the full-rule quadrature points.
    Rotation lambda0_left, lambda0_right;
    Eigen::Matrix3Xd kappa0_full;

    /// Computes the derived reference data. Must be called after the
    /// geometry fields change and before any element evaluation.
    void finalize();

    double length() const { return 2.0 * jacobian; }
};

/// Distributed loading on one element, scaled by the global load factor.
/// Forces are spatial dead loads, linear in xi between the two end values.
/// The couple is a constant spatial moment per unit length; it is
/// non-conservative, enters the residual and tangent directly, and is
/// excluded from reported energies.
struct ElementLoad {
    Vec3 force_left = Vec3::Zero();
    Vec3 force_right = Vec3::Zero();
    Vec3 couple = Vec3::Zero();

    bool has_force() const {
        return force_left.squaredNorm() > 0.0 || force_right.squaredNorm() > 0.0;
    }
    bool has_couple() const { return couple.squaredNorm() > 0.0; }
};

/// Energy of one element split by term. The total entering the equilibrium
/// problem is gamma + kappa_dual + jump - lambda * load_work (the couple,
/// having no potential, is absent).
struct ElementEnergy {
    double gamma = 0.0;       // integral of the force-strain density
    double kappa_dual = 0.0;  // integral of the dual moment density
    double jump = 0.0;        // end-jump work, right minus left
    double load_work = 0.0;   // dead-force potential per unit load factor
    double complementary_kappa = 0.0;    // integral of M . C_kappa^-1 . M
    Vec3 jump_angle_left = Vec3::Zero();  // rotation gap element -> vertex
    Vec3 jump_angle_right = Vec3::Zero();

    double total(double lambda) const { return gamma + kappa_dual + jump - lambda * load_work; }
};

/// Element rotation field exp(psi_lo) exp(psi_ho(xi)) where psi_ho_coeffs
/// holds the coefficients on P_1 .. P_{k-1} (columns; may be empty).
/// Throws RelativeRotationTooLarge when |psi_ho(xi)| reaches pi.
Rotation local_rotation(const Vec3& psi_lo, const Eigen::Matrix3Xd& psi_ho_coeffs, double xi);

/// Work of the end moment through the rotation gap between the element
/// field and the vertex frame exp(psi_v) lambda0_end, with the end sign
/// (+1 right, -1 left) applied:
///   sign * log((Lambda_E_end)^T exp(psi_v) lambda0_end) . m_end.
double interface_jump(const Rotation& lambda_e_end, const Vec3& psi_v, const Rotation& lambda0_end,
                      const Vec3& m_end, double sign);

/// Dof vector representing the reference (undeformed, moment-free) state.
Eigen::VectorXd reference_dofs(const ElementDef& def);

/// Centerline point r(xi) of the element at dof values x.
Vec3 centerline_point(const ElementDef& def, const Eigen::VectorXd& x, double xi);

/// Element energy at dof values x (size 9k+12).
ElementEnergy element_energy(const ElementDef& def, const Eigen::VectorXd& x,
                             IntegrationScheme scheme = IntegrationScheme::kReduced,
                             const ElementLoad* load = nullptr);

/// Gradient of the element energy, including load terms scaled by lambda.
Eigen::VectorXd element_residual(const ElementDef& def, const Eigen::VectorXd& x, double lambda,
                                 IntegrationScheme scheme = IntegrationScheme::kReduced,
                                 const ElementLoad* load = nullptr);

/// Second derivative of the element energy (consistent with
/// element_residual). Symmetric except for the distributed-couple part.
Eigen::MatrixXd element_tangent(const ElementDef& def, const Eigen::VectorXd& x, double lambda,
                                IntegrationScheme scheme = IntegrationScheme::kReduced,
                                const ElementLoad* load = nullptr);

/// Residual and tangent in one pass (the assembly path).
void element_system(const ElementDef& def, const Eigen::VectorXd& x, double lambda,
                    IntegrationScheme scheme, const ElementLoad* load, Eigen::VectorXd& residual,
                    Eigen::MatrixXd& tangent);

/// Static condensation of the rows/columns listed in condensed (any index
/// set): the Schur complement system on the remaining dofs plus the data
/// needed to recover the eliminated increment,
///   dx_c = recover_rhs + recover_matrix * dx_r.
/// Throws SingularCondensationBlock when the eliminated block cannot be
/// inverted.
struct Condensed {
    Eigen::MatrixXd tangent;         // Schur complement on retained dofs
    Eigen::VectorXd residual;        // reduced right-hand side source
    Eigen::MatrixXd recover_matrix;  // -Kcc^-1 Kcr
    Eigen::VectorXd recover_rhs;     // -Kcc^-1 gc
    std::vector<int> retained;       // global-in-element indices kept
    std::vector<int> condensed;      // indices eliminated
};

Condensed condense(const Eigen::MatrixXd& tangent, const Eigen::VectorXd& residual,
                   const std::vector<int>& condensed_indices);

}  // namespace beamfe
