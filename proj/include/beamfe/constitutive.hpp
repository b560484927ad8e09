#pragma once

#include "beamfe/errors.hpp"
#include "beamfe/so3.hpp"

namespace beamfe {

/// Diagonal linear constitutive operators of a beam cross-section:
/// C_gamma = diag(EA, GA2, GA3) acting on force strains and
/// C_kappa = diag(GIt, EI2, EI3) acting on moment strains.
struct CrossSection {
    double EA = 0.0, GA2 = 0.0, GA3 = 0.0;   // force
    double GIt = 0.0, EI2 = 0.0, EI3 = 0.0;  // force * length^2

    Vec3 c_gamma() const { return {EA, GA2, GA3}; }
    Vec3 c_kappa() const { return {GIt, EI2, EI3}; }
    Vec3 c_kappa_inv() const { return {1.0 / GIt, 1.0 / EI2, 1.0 / EI3}; }

    void validate() const {
        if (!(EA > 0.0 && GA2 > 0.0 && GA3 > 0.0 && GIt > 0.0 && EI2 > 0.0 && EI3 > 0.0))
            throw Error("cross-section stiffnesses must all be positive");
    }
};

/// Material force strain gamma = Lambda^T r' - e1 (straight-reference
/// convention; initial curvature enters through the rotation reference
/// fields, not through gamma).
inline Vec3 force_strain(const Rotation& lambda, const Vec3& r_prime) {
    return rotate_inverse(lambda, r_prime) - Vec3::UnitX();
}

/// Material moment strain kappa = T^T(psi) psi' - T^T(psi0) psi0'.
Vec3 curvature_local(const Vec3& psi, const Vec3& psi_prime, const Vec3& psi0,
                     const Vec3& psi0_prime);

/// Strain energy density phi_gamma = 1/2 gamma . C_gamma . gamma.
inline double energy_gamma(const Vec3& gamma, const CrossSection& cs) {
    return 0.5 * gamma.dot(cs.c_gamma().cwiseProduct(gamma));
}

/// Material stress resultant N = C_gamma . gamma, the gradient of
/// energy_gamma.
inline Vec3 stress_n(const Vec3& gamma, const CrossSection& cs) {
    return cs.c_gamma().cwiseProduct(gamma);
}

/// Legendre-dual moment energy density
/// phi_bar_kappa = -1/2 M . C_kappa^-1 . M + kappa . M;
/// stationary in M at M = C_kappa . kappa with value 1/2 kappa . C_kappa . kappa.
inline double dual_energy_kappa(const Vec3& m, const Vec3& kappa, const CrossSection& cs) {
    return -0.5 * m.dot(cs.c_kappa_inv().cwiseProduct(m)) + kappa.dot(m);
}

struct SpatialResultants {
    Vec3 n, m;
};

/// Push-forward of material resultants to the spatial frame:
/// n = Lambda N, m = Lambda M.
inline SpatialResultants spatial_resultants(const Rotation& lambda, const Vec3& n_material,
                                            const Vec3& m_material) {
    return {rotate(lambda, n_material), rotate(lambda, m_material)};
}

}  // namespace beamfe
