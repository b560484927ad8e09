#include "beamfe/so3.hpp"

#include <cmath>

namespace beamfe {

namespace {

detail::Quat<double> normalized(detail::Quat<double> q) {
    const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
    const double s = (q.w < 0.0 ? -1.0 : 1.0) / n;  // canonical cover: w >= 0
    return {s * q.w, s * q.x, s * q.y, s * q.z};
}

}  // namespace

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
    return from_raw({w, x, y, z});
}

Rotation Rotation::from_raw(const detail::Quat<double>& q) {
    Rotation r;
    r.q_ = normalized(q);
    return r;
}

Rotation Rotation::from_matrix(const Mat3& m) {
    // Shepperd's method: pick the largest of the four squared components.
    const double t = m.trace();
    detail::Quat<double> q;
    if (t >= m(0, 0) && t >= m(1, 1) && t >= m(2, 2)) {
        const double s = std::sqrt(1.0 + t) * 2.0;  // 4 w
        q.w = 0.25 * s;
        q.x = (m(2, 1) - m(1, 2)) / s;
        q.y = (m(0, 2) - m(2, 0)) / s;
        q.z = (m(1, 0) - m(0, 1)) / s;
    } else if (m(0, 0) >= m(1, 1) && m(0, 0) >= m(2, 2)) {
        const double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;  // 4 x
        q.w = (m(2, 1) - m(1, 2)) / s;
        q.x = 0.25 * s;
        q.y = (m(0, 1) + m(1, 0)) / s;
        q.z = (m(0, 2) + m(2, 0)) / s;
    } else if (m(1, 1) >= m(2, 2)) {
        const double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;  // 4 y
        q.w = (m(0, 2) - m(2, 0)) / s;
        q.x = (m(0, 1) + m(1, 0)) / s;
        q.y = 0.25 * s;
        q.z = (m(1, 2) + m(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;  // 4 z
        q.w = (m(1, 0) - m(0, 1)) / s;
        q.x = (m(0, 2) + m(2, 0)) / s;
        q.y = (m(1, 2) + m(2, 1)) / s;
        q.z = 0.25 * s;
    }
    return from_raw(q);
}

Mat3 Rotation::matrix() const {
    const double w = q_.w, x = q_.x, y = q_.y, z = q_.z;
    Mat3 m;
    m << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
        2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
        2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
    return m;
}

Rotation Rotation::inverse() const {
    return from_raw(detail::quat_conj(q_));
}

Rotation exp_rotvec(const Vec3& psi) {
    return Rotation::from_raw(detail::quat_exp(psi.x(), psi.y(), psi.z()));
}

Vec3 log_rotation(const Rotation& r) {
    const detail::Quat<double>& q = r.raw();  // w >= 0 by construction
    if (q.w <= detail::kHalfTurnScalar) {
        // Half turn (up to ~1e-12 rad): the axis is the quaternion vector
        // part; fix its sign so the first nonzero component is positive.
        Vec3 u(q.x, q.y, q.z);
        u.normalize();
        for (int i = 0; i < 3; ++i) {
            if (std::abs(u[i]) > 1e-12) {
                if (u[i] < 0.0) u = -u;
                break;
            }
        }
        const double angle = 2.0 * std::atan2(std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z), q.w);
        return angle * u;
    }
    double out[3];
    detail::quat_log_pos(q, out);
    return {out[0], out[1], out[2]};
}

Mat3 tangent_map(const Vec3& psi) {
    double c1, c2;
    detail::tangent_coeffs(psi.squaredNorm(), c1, c2);
    const Mat3 k = skew(psi);
    return Mat3::Identity() + c1 * k + c2 * k * k;
}

Rotation compose(const Rotation& a, const Rotation& b) {
    return Rotation::from_raw(detail::quat_mul(a.raw(), b.raw()));
}

Vec3 rotate(const Rotation& r, const Vec3& v) {
    double out[3];
    detail::quat_rotate(r.raw(), v.x(), v.y(), v.z(), out);
    return {out[0], out[1], out[2]};
}

Vec3 rotate_inverse(const Rotation& r, const Vec3& v) {
    double out[3];
    detail::quat_rotate_inv(r.raw(), v.x(), v.y(), v.z(), out);
    return {out[0], out[1], out[2]};
}

Vec3 relative_rotvec(const Rotation& a, const Rotation& b) {
    return log_rotation(compose(a.inverse(), b));
}

}  // namespace beamfe
