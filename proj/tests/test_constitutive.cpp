#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beamfe/constitutive.hpp"

using namespace beamfe;

namespace {

constexpr double kPi = std::numbers::pi;

std::mt19937& rng() {
    static std::mt19937 gen(77100231u);
    return gen;
}

Vec3 random_vec(double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng()), u(rng()), u(rng())};
}

Rotation random_rotation() {
    Vec3 v = random_vec(1.0);
    if (v.norm() < 1e-6) v = Vec3::UnitX();
    std::uniform_real_distribution<double> a(0.0, kPi - 0.05);
    return exp_rotvec(a(rng()) * v.normalized());
}

CrossSection random_section() {
    std::uniform_real_distribution<double> u(0.5, 50.0);
    return {u(rng()), u(rng()), u(rng()), u(rng()), u(rng()), u(rng())};
}

Vec3 vee(const Mat3& m) {
    return {m(2, 1), m(0, 2), m(1, 0)};
}

}  // namespace

TEST_CASE("force_strain vanishes in the undeformed state and measures stretch") {
    for (int i = 0; i < 20; ++i) {
        const Rotation lam = random_rotation();
        CHECK(force_strain(lam, rotate(lam, Vec3::UnitX())).norm() <= 1e-14);
    }
    const double alpha = 1.37;
    CHECK((force_strain(Rotation::identity(), alpha * Vec3::UnitX()) - (alpha - 1.0) * Vec3::UnitX())
              .norm() <= 1e-15);
}

TEST_CASE("strain measures are objective under superimposed rigid rotation") {
    for (int i = 0; i < 1000; ++i) {
        const Rotation lam = random_rotation();
        const Rotation rig = random_rotation();
        const Vec3 rp = random_vec(2.0);
        const Vec3 g0 = force_strain(lam, rp);
        const Vec3 g1 = force_strain(compose(rig, lam), rotate(rig, rp));
        CHECK((g0 - g1).norm() <= 1e-12 * std::max(1.0, g0.norm()));
    }
}

TEST_CASE("curvature_local basics") {
    const Vec3 z = Vec3::Zero();
    CHECK(curvature_local(z, z, z, z).norm() == 0.0);

    // identical current and reference fields cancel exactly
    for (int i = 0; i < 20; ++i) {
        const Vec3 psi = random_vec(2.0), psip = random_vec(3.0);
        CHECK(curvature_local(psi, psip, psi, psip).norm() == 0.0);
    }

    // constant axis: the tangent map acts as identity along its own axis
    const double c = 0.83, a = 1.91;
    const Vec3 kap = curvature_local(a * Vec3::UnitZ(), c * Vec3::UnitZ(), z, z);
    CHECK((kap - c * Vec3::UnitZ()).norm() <= 1e-13);
}

TEST_CASE("curvature_local matches the finite-difference of the rotation field") {
    // smooth rotation-vector field psi(s) = p0 + p1 s + p2 s^2 evaluated at s0
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const Vec3 p0 = random_vec(1.2), p1 = random_vec(1.0), p2 = random_vec(0.7);
        const double s0 = 0.3;
        auto psi_at = [&](double s) { return (p0 + s * p1 + s * s * p2).eval(); };
        const Vec3 psi = psi_at(s0);
        const Vec3 psip = p1 + 2.0 * s0 * p2;

        const Mat3 lm = exp_rotvec(psi_at(s0 - h)).matrix();
        const Mat3 lp = exp_rotvec(psi_at(s0 + h)).matrix();
        const Mat3 l = exp_rotvec(psi).matrix();
        const Mat3 d = l.transpose() * ((lp - lm) / (2.0 * h));
        const Vec3 kap_fd = vee(0.5 * (d - d.transpose()));

        const Vec3 kap = curvature_local(psi, psip, Vec3::Zero(), Vec3::Zero());
        CHECK((kap - kap_fd).norm() <= 1e-5 * std::max(1.0, kap.norm()));
    }
}

TEST_CASE("energy_gamma and stress_n are a consistent potential") {
    CrossSection cs{100.0, 40.0, 60.0, 10.0, 20.0, 30.0};
    CHECK(energy_gamma(Vec3::Zero(), cs) == 0.0);
    CHECK(stress_n(Vec3::Zero(), cs).norm() == 0.0);
    CHECK(energy_gamma(Vec3::UnitX(), cs) == doctest::Approx(50.0));
    CHECK((stress_n(Vec3::UnitX(), cs) - 100.0 * Vec3::UnitX()).norm() == 0.0);

    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const CrossSection s = random_section();
        const Vec3 g = random_vec(0.5), d = random_vec(1.0);
        const double fd = (energy_gamma(g + h * d, s) - energy_gamma(g - h * d, s)) / (2.0 * h);
        const double an = stress_n(g, s).dot(d);
        CHECK(fd == doctest::Approx(an).epsilon(1e-8));
    }
}

TEST_CASE("dual_energy_kappa is the Legendre transform of the curvature energy") {
    for (int i = 0; i < 100; ++i) {
        const CrossSection cs = random_section();
        const Vec3 kap = random_vec(0.8);
        const Vec3 m_star = cs.c_kappa().cwiseProduct(kap);
        const double analytic_max = 0.5 * kap.dot(cs.c_kappa().cwiseProduct(kap));

        CHECK(dual_energy_kappa(Vec3::Zero(), kap, cs) == 0.0);
        CHECK(dual_energy_kappa(m_star, kap, cs) == doctest::Approx(analytic_max).epsilon(1e-12));

        // FD stationarity at the maximizer; phi_bar is quadratic in M, so a
        // wide central stencil is truncation-free and avoids cancellation
        const double h = 1e-2;
        Vec3 grad;
        for (int d = 0; d < 3; ++d) {
            Vec3 e = Vec3::Zero();
            e[d] = 1.0;
            grad[d] = (dual_energy_kappa(m_star + h * e, kap, cs) -
                       dual_energy_kappa(m_star - h * e, kap, cs)) /
                      (2.0 * h);
        }
        CHECK(grad.norm() <= 1e-10 * std::max(1.0, analytic_max));

        // grid search around the maximizer never exceeds the analytic value
        const double delta = 0.5 * std::max(1.0, m_star.norm());
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b)
                for (int c = -2; c <= 2; ++c) {
                    const Vec3 m = m_star + (delta / 2.0) * Vec3(a, b, c);
                    CHECK(dual_energy_kappa(m, kap, cs) <= analytic_max + 1e-10);
                }
    }
}

TEST_CASE("spatial_resultants is the frame push-forward") {
    const Vec3 n = random_vec(2.0), m = random_vec(2.0);
    const auto id = spatial_resultants(Rotation::identity(), n, m);
    CHECK((id.n - n).norm() == 0.0);
    CHECK((id.m - m).norm() == 0.0);

    for (int i = 0; i < 50; ++i) {
        const Rotation lam = random_rotation();
        const auto sr = spatial_resultants(lam, n, m);
        CHECK(sr.n.norm() == doctest::Approx(n.norm()).epsilon(1e-12));
        CHECK((rotate_inverse(lam, sr.n) - n).norm() <= 1e-12 * std::max(1.0, n.norm()));
        CHECK((rotate_inverse(lam, sr.m) - m).norm() <= 1e-12 * std::max(1.0, m.norm()));
    }
}
