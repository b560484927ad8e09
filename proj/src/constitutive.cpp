#include "beamfe/constitutive.hpp"

#include "beamfe/detail/rotation_kernels.hpp"

namespace beamfe {

Vec3 curvature_local(const Vec3& psi, const Vec3& psi_prime, const Vec3& psi0,
                     const Vec3& psi0_prime) {
    double cur[3], ref[3];
    detail::tangent_tr_apply(psi.data(), psi_prime.data(), cur);
    detail::tangent_tr_apply(psi0.data(), psi0_prime.data(), ref);
    return {cur[0] - ref[0], cur[1] - ref[1], cur[2] - ref[2]};
}

}  // namespace beamfe
