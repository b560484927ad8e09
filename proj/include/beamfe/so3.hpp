#pragma once

#include <Eigen/Dense>

#include "beamfe/detail/rotation_kernels.hpp"

namespace beamfe {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Angle in radians below which rotation kernels switch from closed-form
/// expressions to series expansions.
inline constexpr double kSmallAngle = detail::kSmallAngle;

/// Skew-symmetric matrix of v: skew(v) * b == v.cross(b).
Mat3 skew(const Vec3& v);

/// Orientation value. Stored as a unit quaternion with nonnegative scalar
/// part; matrices are produced on demand.
class Rotation {
public:
    Rotation() : q_{1.0, 0.0, 0.0, 0.0} {}

    static Rotation identity() { return Rotation(); }

    /// Builds from quaternion components (w, x, y, z); normalizes.
    static Rotation from_quaternion(double w, double x, double y, double z);

    /// Converts an orthogonal matrix with determinant +1. Stable for all
    /// angles including half turns.
    static Rotation from_matrix(const Mat3& m);

    Mat3 matrix() const;
    Rotation inverse() const;

    /// Quaternion components as (w, x, y, z), w >= 0.
    Eigen::Vector4d quaternion() const { return {q_.w, q_.x, q_.y, q_.z}; }

    /// Internal storage; used by the element kernels.
    const detail::Quat<double>& raw() const { return q_; }

    static Rotation from_raw(const detail::Quat<double>& q);

private:
    detail::Quat<double> q_;
};

/// Exponential map: rotation by angle |psi| about axis psi/|psi|.
Rotation exp_rotvec(const Vec3& psi);

/// Principal logarithm, |result| <= pi. At a half turn the axis sign is
/// fixed deterministically: the first component of the axis larger than
/// 1e-12 in magnitude is made positive.
Vec3 log_rotation(const Rotation& r);

/// Tangent map T(psi) relating rotation-vector variations to the spin
/// vector: d(exp(psi)) * exp(psi)^T = skew(T(psi) * dpsi).
Mat3 tangent_map(const Vec3& psi);

/// Group product: matrix(compose(a, b)) = matrix(a) * matrix(b).
Rotation compose(const Rotation& a, const Rotation& b);

/// matrix(r) * v
Vec3 rotate(const Rotation& r, const Vec3& v);

/// matrix(r)^T * v
Vec3 rotate_inverse(const Rotation& r, const Vec3& v);

/// log(a^T b): the rotation vector taking a to b, invariant under common
/// left-composition.
Vec3 relative_rotvec(const Rotation& a, const Rotation& b);

}  // namespace beamfe
