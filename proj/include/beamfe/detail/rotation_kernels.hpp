#pragma once

#include <cmath>

#include "beamfe/detail/dual.hpp"

namespace beamfe::detail {

// Angle below which the rotation kernels switch from closed-form
// expressions to series in the squared angle. At 1e-4 rad both branches
// agree to ~1e-13 and every series argument stays well clear of 0/0.
inline constexpr double kSmallAngle = 1e-4;
inline constexpr double kSmallAngleSq = kSmallAngle * kSmallAngle;

// Scalar part below which a unit quaternion is treated as a half turn and
// the logarithm applies its deterministic axis-sign convention.
inline constexpr double kHalfTurnScalar = 1e-12;

template <class S>
struct Quat {
    S w, x, y, z;
};

template <class S>
Quat<S> quat_mul(const Quat<S>& a, const Quat<S>& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

template <class S>
Quat<S> quat_conj(const Quat<S>& q) {
    return {q.w, -q.x, -q.y, -q.z};
}

// Unit quaternion of the rotation vector p: (cos(n/2), sin(n/2) p/n) with
// n = |p|. Both half-angle factors are series in n^2 below the switch so
// the map stays smooth through n = 0 (required for differentiation).
template <class S>
Quat<S> quat_exp(const S& px, const S& py, const S& pz) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    const S n2 = px * px + py * py + pz * pz;
    S w, f;
    if (value(n2) < kSmallAngleSq) {
        w = 1.0 + n2 * (-1.0 / 8.0 + n2 * (1.0 / 384.0 + n2 * (-1.0 / 46080.0)));
        f = 0.5 + n2 * (-1.0 / 48.0 + n2 * (1.0 / 3840.0 + n2 * (-1.0 / 645120.0)));
    } else {
        const S n = sqrt(n2);
        w = cos(0.5 * n);
        f = sin(0.5 * n) / n;
    }
    return {w, f * px, f * py, f * pz};
}

// R(q) * v for a unit quaternion
template <class S>
void quat_rotate(const Quat<S>& q, const S& vx, const S& vy, const S& vz, S out[3]) {
    // t = 2 u x v, R v = v + w t + u x t
    const S tx = 2.0 * (q.y * vz - q.z * vy);
    const S ty = 2.0 * (q.z * vx - q.x * vz);
    const S tz = 2.0 * (q.x * vy - q.y * vx);
    out[0] = vx + q.w * tx + q.y * tz - q.z * ty;
    out[1] = vy + q.w * ty + q.z * tx - q.x * tz;
    out[2] = vz + q.w * tz + q.x * ty - q.y * tx;
}

// R(q)^T * v
template <class S>
void quat_rotate_inv(const Quat<S>& q, const S& vx, const S& vy, const S& vz, S out[3]) {
    quat_rotate(quat_conj(q), vx, vy, vz, out);
}

// Rotation vector of a unit quaternion whose scalar part is positive
// (angle strictly below pi): psi = 2 atan2(|u|, w) u/|u|, with the factor
// evaluated as a series in t^2 = |u|^2/w^2 near zero. Callers handle the
// w <= 0 flip and the half-turn axis convention.
template <class S>
void quat_log_pos(const Quat<S>& q, S out[3]) {
    using std::atan2;
    using std::sqrt;
    const S n2 = q.x * q.x + q.y * q.y + q.z * q.z;
    S f;
    if (value(n2) < 0.25 * kSmallAngleSq) {  // |u| = sin(angle/2), so angle < kSmallAngle
        const S t2 = n2 / (q.w * q.w);
        f = (2.0 + t2 * (-2.0 / 3.0 + t2 * (2.0 / 5.0 + t2 * (-2.0 / 7.0)))) / q.w;
    } else {
        const S n = sqrt(n2);
        f = 2.0 * atan2(n, q.w) / n;
    }
    out[0] = f * q.x;
    out[1] = f * q.y;
    out[2] = f * q.z;
}

// Coefficients of the tangent map T = I + c1 skew(psi) + c2 skew(psi)^2
// as functions of the squared angle.
template <class S>
void tangent_coeffs(const S& n2, S& c1, S& c2) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    if (value(n2) < kSmallAngleSq) {
        c1 = 0.5 + n2 * (-1.0 / 24.0 + n2 * (1.0 / 720.0 + n2 * (-1.0 / 40320.0)));
        c2 = 1.0 / 6.0 + n2 * (-1.0 / 120.0 + n2 * (1.0 / 5040.0 + n2 * (-1.0 / 362880.0)));
    } else {
        const S n = sqrt(n2);
        c1 = (1.0 - cos(n)) / n2;
        c2 = (n - sin(n)) / (n2 * n);
    }
}

// T(psi)^T d = d - c1 psi x d + c2 psi x (psi x d); with d = psi' this is
// the material curvature-rate of the rotation-vector field psi.
template <class S>
void tangent_tr_apply(const S psi[3], const S d[3], S out[3]) {
    const S n2 = psi[0] * psi[0] + psi[1] * psi[1] + psi[2] * psi[2];
    S c1, c2;
    tangent_coeffs(n2, c1, c2);
    const S ax = psi[1] * d[2] - psi[2] * d[1];
    const S ay = psi[2] * d[0] - psi[0] * d[2];
    const S az = psi[0] * d[1] - psi[1] * d[0];
    const S bx = psi[1] * az - psi[2] * ay;
    const S by = psi[2] * ax - psi[0] * az;
    const S bz = psi[0] * ay - psi[1] * ax;
    out[0] = d[0] - c1 * ax + c2 * bx;
    out[1] = d[1] - c1 * ay + c2 * by;
    out[2] = d[2] - c1 * az + c2 * bz;
}

}  // namespace beamfe::detail
