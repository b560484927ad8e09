/// Acceptance gate: eight end-to-end checks of the library against embedded
/// reference values and structural properties. Prints one PASS/FAIL line per
/// criterion; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "beamfe/benchmarks.hpp"
#include "beamfe/constitutive.hpp"
#include "beamfe/element.hpp"
#include "beamfe/mesh.hpp"
#include "beamfe/so3.hpp"
#include "beamfe/solver.hpp"

namespace {

using namespace beamfe;

constexpr double kPi = std::numbers::pi;
int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  (%s)\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, pattern, a, b, c);
    return buffer;
}

Vec3 random_vec(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

// ---------------------------------------------------------------------------
// 1. Out-of-plane bend of a 45-degree arc: tip displacements for three
//    slenderness ratios against the embedded reference table.

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Entry {
        double rho;
        Vec3 u;
    };
    const Entry table[] = {
        {10.0, {-23.64501, -13.63207, 54.09503}},
        {100.0, {-23.56024, -13.60452, 53.47486}},
        {1000.0, {-23.55939, -13.60425, 53.46866}},
    };
    double worst = 0.0;
    for (const Entry& entry : table) {
        const auto run = bench::run_arc45(4, 32, entry.rho);
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(run.monitor_displacement(i) - entry.u(i)) /
                                        std::abs(entry.u(i)));
    }
    const double elapsed = seconds_since(t0);
    report(1, worst <= 1e-3 && elapsed < 30.0,
           fmt("max relative tip deviation %.2e vs 1e-3, %.1f s vs 30 s", worst, elapsed));
}

// ---------------------------------------------------------------------------
// 2. Staircase cantilever with two right-angle kinks: tip displacement per
//    unit leg at orders four and one.

void criterion_2() {
    const Vec3 ref4(-1.535072, -0.1758755, -2.484219);
    const Vec3 ref1(-1.534489, -0.1759337, -2.485712);
    const auto run4 = bench::run_slope(4, 24);
    const auto run1 = bench::run_slope(1, 24);
    const double dev4 = (run4.monitor_displacement - ref4).cwiseAbs().maxCoeff();
    const double dev1 = (run1.monitor_displacement - ref1).cwiseAbs().maxCoeff();
    report(2, dev4 <= 1e-4 && dev1 <= 1e-3,
           fmt("k=4 deviation %.2e vs 1e-4, k=1 deviation %.2e vs 1e-3", dev4, dev1));
}

// ---------------------------------------------------------------------------
// 3. Tightly coiled rod: coarse-mesh tip against a fine self-reference, with
//    componentwise bounds at twice the embedded deviations.

void criterion_3() {
    const auto coarse = bench::run_helical(3, 30);
    const auto fine = bench::run_helical(4, 100);
    const Vec3 dev = (coarse.monitor_displacement - fine.monitor_displacement).cwiseAbs();
    const Vec3 bound(2.0 * 5.6e-7, 2.0 * 2.0e-8, 2.0 * 2.4e-5);
    const bool ok = (dev.array() <= bound.array()).all();
    report(3, ok,
           fmt("tip deviations %.2e / %.2e / %.2e vs 1.1e-6 / 4e-8 / 4.8e-5", dev(0), dev(1),
               dev(2)));
}

// ---------------------------------------------------------------------------
// 4. Winding a straight rod onto an exact helix: tip node exact with five
//    first-order elements; every node exact with three second-order elements.

Vec3 helix_point(double theta) {
    return {10.0 * std::sin(theta), -10.0 * std::cos(theta), 50.0 / (4.0 * kPi) * theta};
}

void criterion_4() {
    const auto lo = bench::run_helix(1, 5);
    const Vec3 tip = lo.state.segment<3>(lo.layout.node_position(5));
    const double tip_dev = (tip - helix_point(4.0 * kPi)).norm();

    const auto hi = bench::run_helix(2, 3);
    double node_dev = 0.0;
    for (int node = 0; node <= 3; ++node) {
        const Vec3 got = hi.state.segment<3>(hi.layout.node_position(node));
        node_dev = std::max(node_dev, (got - helix_point(4.0 * kPi * node / 3.0)).norm());
    }
    report(4, tip_dev <= 1e-8 && node_dev <= 1e-8,
           fmt("k=1 n=5 tip deviation %.2e vs 1e-8, k=2 n=3 max nodal deviation %.2e vs 1e-8",
               tip_dev, node_dev));
}

// ---------------------------------------------------------------------------
// 5. Branched fork: displacements independent of the order in which the two
//    tine loads are applied, and the embedded two-load reference row.

void criterion_5() {
    const auto a = bench::run_fork(4, 30, false);
    const auto b = bench::run_fork(4, 30, true);
    double path_dev = 0.0;
    for (int node : {10, 20, 30}) {  // branch point and the two tine tips
        const int base = a.layout.node_position(node);
        path_dev = std::max(path_dev,
                            (a.state.segment<3>(base) - b.state.segment<3>(base)).norm());
    }

    const auto& phase1 = a.series.at("u_p1_phase1");
    const Vec3 after_first(phase1[0], phase1[1], phase1[2]);
    const double dev1 =
        (after_first - Vec3(-1.088614, -0.746307, 1.978301)).cwiseAbs().maxCoeff();
    const double dev2 =
        (a.monitor_displacement - Vec3(-0.598829, -0.727134, 1.479860)).cwiseAbs().maxCoeff();

    report(5, path_dev <= 1e-8 && dev1 <= 1e-4 && dev2 <= 1e-4,
           fmt("order dependence %.2e vs 1e-8, phase deviations %.2e / %.2e vs 1e-4", path_dev,
               dev1, dev2));
}

// ---------------------------------------------------------------------------
// 6. Frame indifference under load: ten full prescribed turns of a pre-bent
//    cantilever leave tip height and curvature energy unchanged.

void criterion_6() {
    const auto run = bench::run_objectivity(3, 4, 10.0);
    const auto& u3 = run.series.at("u3");
    const auto& phi = run.series.at("phi");
    double du = 0.0, dphi = 0.0;
    for (double v : u3) du = std::max(du, std::abs(v - u3.front()));
    for (double v : phi) dphi = std::max(dphi, std::abs(v - phi.front()));
    const double arc_length = 0.5 * kPi * 10.0;
    report(6, du <= 1e-9 * arc_length && dphi <= 1e-9 * std::abs(phi.front()),
           fmt("height drift %.2e vs %.2e, energy drift %.2e relative vs 1e-9", du,
               1e-9 * arc_length, dphi / std::abs(phi.front())));
}

// ---------------------------------------------------------------------------
// 7. Convergence of the roll-up family: fitted rates above k + 0.8 with
//    reduced quadrature, slenderness-independent first-order errors, and a
//    visible loss of order under full quadrature.

double fitted_rate(const std::vector<bench::CaseRow>& rows) {
    // least-squares slope of log2(error) against log2(nelem), floor excluded
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (const auto& row : rows) {
        if (!(row.e_l2 > 1e-12)) continue;
        const double x = std::log2(double(row.nelem));
        const double y = std::log2(row.e_l2);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return 1e9;  // everything at the floor: vacuously fast
    return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    bool rates_ok = true;
    std::string rate_list;
    for (int k = 1; k <= 4; ++k) {
        bench::CaseParams p;
        p.k = k;
        p.rho = 1000.0;
        const double rate = fitted_rate(bench::benchmark_rows("rollup", p));
        rates_ok = rates_ok && rate >= k + 0.8;
        rate_list += fmt("%.2f", std::min(rate, 99.0)) + (k < 4 ? "/" : "");
    }

    double slenderness_dev = 0.0;
    {
        bench::CaseParams p;
        p.k = 1;
        p.rho = 10.0;
        const auto r10 = bench::benchmark_rows("rollup", p);
        p.rho = 100.0;
        const auto r100 = bench::benchmark_rows("rollup", p);
        p.rho = 1000.0;
        const auto r1000 = bench::benchmark_rows("rollup", p);
        for (std::size_t i = 0; i < r10.size(); ++i) {
            slenderness_dev =
                std::max(slenderness_dev, std::abs(r100[i].e_l2 / r10[i].e_l2 - 1.0));
            slenderness_dev =
                std::max(slenderness_dev, std::abs(r1000[i].e_l2 / r10[i].e_l2 - 1.0));
        }
    }

    double degradation = 0.0;
    {
        bench::CaseParams p;
        p.k = 2;
        p.rho = 1000.0;
        const double reduced = fitted_rate(bench::benchmark_rows("rollup", p));
        p.scheme = IntegrationScheme::kFull;
        const double full = fitted_rate(bench::benchmark_rows("rollup", p));
        degradation = reduced - full;
    }

    const double elapsed = seconds_since(t0);
    report(7,
           rates_ok && slenderness_dev <= 0.01 && degradation >= 0.5 && elapsed < 300.0,
           "rates " + rate_list +
               fmt(", slenderness spread %.3f%% vs 1%%, full-rule rate loss %.2f vs 0.5, ",
                   100.0 * slenderness_dev, degradation) +
               fmt("%.0f s vs 300 s", elapsed));
}

// ---------------------------------------------------------------------------
// 8. Numerical kernels: rotation-map round trips, tangent-map consistency,
//    element residual/tangent against finite differences, strain frame
//    indifference, condensation transparency, and builder equilibrium.

ElementDef random_def(int k, std::mt19937& rng) {
    ElementDef d;
    d.order = k;
    d.jacobian = 0.4 + 0.3 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::uniform_real_distribution<double> s(0.5, 3.0);
    d.section = CrossSection{s(rng), s(rng), s(rng), s(rng), s(rng), s(rng)};
    d.r0.resize(3, k + 1);
    d.r0.col(0) = random_vec(rng, 0.3);
    d.r0.col(1) = d.r0.col(0) + 2.0 * d.jacobian * Vec3::UnitX() + random_vec(rng, 0.1);
    for (int j = 2; j <= k; ++j) d.r0.col(j) = random_vec(rng, 0.05);
    d.psi0_lo = random_vec(rng, 0.4);
    d.psi0_ho.resize(3, k - 1);
    for (int j = 0; j < k - 1; ++j) d.psi0_ho.col(j) = random_vec(rng, 0.15);
    d.finalize();
    return d;
}

Eigen::VectorXd random_state(const ElementDef& d, std::mt19937& rng) {
    const int k = d.order;
    Eigen::VectorXd x = reference_dofs(d);
    for (int j = 0; j <= k; ++j) x.segment<3>(3 * j) += random_vec(rng, 0.1);
    for (int j = 0; j <= k; ++j) x.segment<3>(3 * layout::moment(k, j)) = random_vec(rng, 0.8);
    x.segment<3>(3 * layout::rot_lo(k)) += random_vec(rng, 0.25);
    for (int j = 1; j < k; ++j) x.segment<3>(3 * layout::rot_ho(k, j)) += random_vec(rng, 0.1);
    x.segment<3>(3 * layout::vertex_left(k)) = random_vec(rng, 0.3);
    x.segment<3>(3 * layout::vertex_right(k)) = random_vec(rng, 0.3);
    return x;
}

void criterion_8() {
    std::mt19937 rng(12345);
    std::vector<std::string> bad;

    {  // exp/log round trip
        double worst = 0.0;
        std::uniform_real_distribution<double> mag(0.0, kPi - 1e-3);
        for (int i = 0; i < 1000; ++i) {
            Vec3 psi = random_vec(rng, 1.0);
            psi = psi.norm() > 0 ? Vec3(psi.normalized() * mag(rng)) : psi;
            worst = std::max(worst, (log_rotation(exp_rotvec(psi)) - psi).norm());
        }
        if (worst > 1e-10) bad.push_back(fmt("roundtrip %.1e", worst));
    }

    {  // tangent map against a finite-difference spatial spin
        double worst = 0.0;
        const double h = 1e-7;
        for (int i = 0; i < 1000; ++i) {
            const Vec3 psi = random_vec(rng, 1.0);
            const Vec3 dir = random_vec(rng, 1.0).normalized();
            const Mat3 lp = exp_rotvec(psi + h * dir).matrix();
            const Mat3 lm = exp_rotvec(psi - h * dir).matrix();
            const Mat3 spin = (lp - lm) / (2.0 * h) * exp_rotvec(psi).matrix().transpose();
            const Vec3 fd(spin(2, 1) - spin(1, 2), spin(0, 2) - spin(2, 0),
                          spin(1, 0) - spin(0, 1));
            worst = std::max(worst, (0.5 * fd - tangent_map(psi) * dir).norm());
        }
        if (worst > 1e-5) bad.push_back(fmt("tangent fd %.1e", worst));
    }

    double residual_dev = 0.0, tangent_dev = 0.0, frame_dev = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const ElementDef d = random_def(k, rng);
        const Eigen::VectorXd x = random_state(d, rng);
        ElementLoad load;
        load.force_left = random_vec(rng, 0.5);
        load.force_right = random_vec(rng, 0.5);
        const double lambda = 0.7;

        const Eigen::VectorXd g = element_residual(d, x, lambda, IntegrationScheme::kReduced,
                                                   &load);
        Eigen::VectorXd g_fd(x.size());
        for (int i = 0; i < x.size(); ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += 1e-6;
            xm(i) -= 1e-6;
            g_fd(i) = (element_energy(d, xp, IntegrationScheme::kReduced, &load).total(lambda) -
                       element_energy(d, xm, IntegrationScheme::kReduced, &load).total(lambda)) /
                      2e-6;
        }
        residual_dev = std::max(residual_dev, (g - g_fd).norm() / std::max(1.0, g.norm()));

        const Eigen::MatrixXd kt = element_tangent(d, x, lambda, IntegrationScheme::kReduced,
                                                   &load);
        Eigen::MatrixXd kt_fd(x.size(), x.size());
        for (int i = 0; i < x.size(); ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += 1e-6;
            xm(i) -= 1e-6;
            kt_fd.col(i) =
                (element_residual(d, xp, lambda, IntegrationScheme::kReduced, &load) -
                 element_residual(d, xm, lambda, IntegrationScheme::kReduced, &load)) /
                2e-6;
        }
        tangent_dev = std::max(tangent_dev, (kt - kt_fd).norm() / std::max(1.0, kt.norm()));

        // frame indifference: a rigid motion leaves every energy term alone
        const Rotation rot = exp_rotvec(random_vec(rng, 1.2));
        const Vec3 shift = random_vec(rng, 2.0);
        Eigen::VectorXd y = x;
        y.segment<3>(0) = rotate(rot, x.segment<3>(0)) + shift;
        y.segment<3>(3) = rotate(rot, x.segment<3>(3)) + shift;
        for (int j = 2; j <= k; ++j) y.segment<3>(3 * j) = rotate(rot, x.segment<3>(3 * j));
        for (int block : {layout::rot_lo(k), layout::vertex_left(k), layout::vertex_right(k)})
            y.segment<3>(3 * block) =
                log_rotation(compose(rot, exp_rotvec(x.segment<3>(3 * block))));
        const ElementEnergy ea = element_energy(d, x);
        const ElementEnergy eb = element_energy(d, y);
        frame_dev = std::max({frame_dev, std::abs(ea.gamma - eb.gamma),
                              std::abs(ea.kappa_dual - eb.kappa_dual),
                              std::abs(ea.jump - eb.jump)});
    }
    if (residual_dev > 1e-6) bad.push_back(fmt("residual fd %.1e", residual_dev));
    if (tangent_dev > 1e-5) bad.push_back(fmt("tangent block fd %.1e", tangent_dev));
    if (frame_dev > 1e-12) bad.push_back(fmt("frame dependence %.1e", frame_dev));

    {  // condensation transparency on a bent solve
        const CrossSection cs{30.0, 12.0, 12.0, 2.0, 2.0, 2.0};
        const Mesh m = build_straight(2.0, 3, 3, cs);
        const DofLayout l = dof_layout(m, 3, true);
        const std::vector<BoundaryCondition> bcs = {
            {0, Constraint::kPosition, m.nodes[0].position, m.nodes[0].position},
            {0, Constraint::kRotation, Vec3::Zero(), Vec3::Zero()},
        };
        LoadCase ramped;
        ramped.forces.push_back({3, Vec3(0.08, 0.12, -0.1)});
        SolverOptions opts;
        Eigen::VectorXd xc = reference_state(m, l);
        opts.condense = true;
        solve_step(m, l, xc, 1.0, ramped, {}, bcs, opts);
        Eigen::VectorXd xp = reference_state(m, l);
        opts.condense = false;
        solve_step(m, l, xp, 1.0, ramped, {}, bcs, opts);
        const double dev = (xc - xp).lpNorm<Eigen::Infinity>();
        if (dev > 1e-10) bad.push_back(fmt("condensation gap %.1e", dev));
    }

    {  // every geometry builder starts in discrete equilibrium
        const CrossSection cs{2.0, 1.5, 1.5, 0.8, 0.8, 0.8};
        double worst = 0.0;
        for (int k : {1, 2, 3, 4}) {
            const Mesh meshes[] = {
                build_straight(2.0, 3, k, cs),
                build_arc(5.0, 1.2, ArcPlane::kXY, 4, k, cs),
                build_arc(5.0, 1.2, ArcPlane::kXZ, 4, k, cs),
                build_helix(4.0, 6.0, 1.5, 24, k, cs),
                build_polyline({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0)}, 2, k, cs),
                build_fork(1.0, 1.0, 2, 4, k, cs),
            };
            for (const Mesh& m : meshes)
                for (const ElementDef& d : m.elements)
                    worst = std::max(worst, element_residual(d, reference_dofs(d), 0.0)
                                                .lpNorm<Eigen::Infinity>());
        }
        if (worst > 1e-12) bad.push_back(fmt("builder residual %.1e", worst));
    }

    std::string detail = "roundtrip, tangent, residual/tangent fd, frame, condensation, builders";
    if (!bad.empty()) {
        detail = "failed:";
        for (const auto& item : bad) detail += " " + item;
    }
    report(8, bad.empty(), detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("%d of 8 criteria passed\n", 8 - failures);
    return failures;
}
