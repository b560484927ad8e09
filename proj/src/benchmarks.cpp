#include "beamfe/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>

namespace beamfe::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

/// Square section of side `a`: polar torsion constant, shear modulus E/2.
CrossSection square_section(double E, double a) {
    CrossSection cs;
    cs.EA = E * a * a;
    cs.GA2 = cs.GA3 = 0.5 * cs.EA;
    cs.EI2 = cs.EI3 = E * a * a * a * a / 12.0;
    cs.GIt = 0.5 * E * a * a * a * a / 6.0;
    return cs;
}

Vec3 tip_displacement(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& x,
                      int node) {
    return x.segment<3>(layout.node_position(node)) - mesh.nodes[node].position;
}

BoundaryCondition clamp_position(const Mesh& mesh, int node) {
    return {node, Constraint::kPosition, mesh.nodes[node].position, mesh.nodes[node].position};
}

BoundaryCondition clamp_rotation(int node) {
    return {node, Constraint::kRotation, Vec3::Zero(), Vec3::Zero()};
}

std::vector<BoundaryCondition> clamp(const Mesh& mesh, int node) {
    return {clamp_position(mesh, node), clamp_rotation(node)};
}

void accumulate(SolveStats& stats, const RunReport& report) {
    stats.newton_iterations += report.total_iterations;
    stats.steps += report.total_steps;
}

void require_positive(int k, int nelem) {
    if (k < 1) throw Error("element order must be at least 1");
    if (nelem < 1) throw Error("element count must be at least 1");
}

}  // namespace

RunOutput run_rollup(int k, int nelem, double rho, IntegrationScheme scheme) {
    require_positive(k, nelem);
    if (!(rho > 0.0)) throw Error("slenderness must be positive");
    const double length = 1.0;
    const CrossSection cs = square_section(1e7, length / rho);

    RunOutput out;
    out.mesh = build_straight(length, nelem, k, cs);
    out.layout = dof_layout(out.mesh, k, true);
    out.monitor_node = nelem;

    // Tip moment bending the beam onto a circle traversed twice.
    const double curvature = 4.0 * kPi / length;
    const double moment = cs.EI3 * curvature;

    std::vector<Phase> phases(1);
    phases[0].bcs = clamp(out.mesh, 0);
    phases[0].ramped.moments.push_back({nelem, moment * Vec3::UnitZ(), MomentFrame::kSpatial});
    phases[0].steps = 4;

    SolverOptions opts;
    opts.load_scale = moment;
    opts.scheme = scheme;

    out.state = reference_state(out.mesh, out.layout);
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, phases, opts));
    out.monitor_displacement = tip_displacement(out.mesh, out.layout, out.state, nelem);

    const auto circle = [curvature](double s) -> Vec3 {
        return {std::sin(curvature * s) / curvature, (1.0 - std::cos(curvature * s)) / curvature,
                0.0};
    };
    out.error = error_l2_position(out.mesh, out.layout, out.state, circle, length);
    return out;
}

RunOutput run_objectivity(int k, int nelem, double rho) {
    require_positive(k, nelem);
    if (!(rho > 0.0)) throw Error("slenderness must be positive");
    const double radius = 10.0;
    const double length = 0.5 * kPi * radius;
    const CrossSection cs = square_section(1e7, radius / rho);

    RunOutput out;
    out.mesh = build_arc(radius, 0.5 * kPi, ArcPlane::kXY, nelem, k, cs);
    out.layout = dof_layout(out.mesh, k, true);
    out.monitor_node = nelem;
    out.state = reference_state(out.mesh, out.layout);

    // Leg one: a follower tip moment lifts the quarter circle out of plane.
    const double moment = 0.5 * kPi * cs.EI2 / length;
    std::vector<Phase> bend(1);
    bend[0].bcs = clamp(out.mesh, 0);
    bend[0].ramped.moments.push_back({nelem, -moment * Vec3::UnitY(), MomentFrame::kMaterial});
    bend[0].steps = 8;

    SolverOptions opts;
    opts.residual_tolerance = 1e-11;
    opts.increment_tolerance = 1e-11;
    opts.load_scale = moment;
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, bend, opts));

    auto& u3 = out.series["u3"];
    auto& phi = out.series["phi"];
    const auto record = [&](const Eigen::VectorXd& x) {
        u3.push_back(x(out.layout.node_position(nelem) + 2));
        phi.push_back(complementary_curvature_energy(out.mesh, out.layout, x));
    };
    record(out.state);

    // Leg two: spin the clamp ten full turns while the follower moment stays
    // on. Every monitored quantity must ride along unchanged.
    std::vector<Phase> spin(1);
    spin[0].bcs = {clamp_position(out.mesh, 0),
                   BoundaryCondition{0, Constraint::kRotation, Vec3::Zero(),
                                     20.0 * kPi * Vec3::UnitZ()}};
    spin[0].held.moments.push_back({nelem, -moment * Vec3::UnitY(), MomentFrame::kMaterial});
    spin[0].steps = 71;

    const auto observe = [&](int, const StepReport&, const Eigen::VectorXd& x) { record(x); };
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, spin, opts, observe));
    out.monitor_displacement = tip_displacement(out.mesh, out.layout, out.state, nelem);
    return out;
}

RunOutput run_arc45(int k, int nelem, double rho) {
    require_positive(k, nelem);
    if (!(rho > 0.0)) throw Error("slenderness must be positive");
    const double radius = 100.0;
    const double a = radius / rho;
    const CrossSection cs = square_section(1e7, a);
    cs.validate();

    RunOutput out;
    out.mesh = build_arc(radius, 0.25 * kPi, ArcPlane::kXY, nelem, k, cs);
    out.layout = dof_layout(out.mesh, k, true);
    out.monitor_node = nelem;

    // Out-of-plane dead force, scaled with the section so every slenderness
    // traces the same deformation.
    const double force = 600.0 * a * a * a * a;

    std::vector<Phase> phases(1);
    phases[0].bcs = clamp(out.mesh, 0);
    phases[0].ramped.forces.push_back({nelem, force * Vec3::UnitZ()});
    phases[0].steps = 10;

    SolverOptions opts;
    opts.load_scale = force;

    out.state = reference_state(out.mesh, out.layout);
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, phases, opts));
    out.monitor_displacement = tip_displacement(out.mesh, out.layout, out.state, nelem);
    return out;
}

RunOutput run_helix(int k, int nelem) {
    require_positive(k, nelem);
    const double r0 = 10.0, height = 50.0, coils = 2.0;
    const double turn = 2.0 * kPi * coils;
    const double slope = height / (turn * r0);
    const double length = std::sqrt(1.0 + slope * slope) * turn * r0;

    // Circular section with zero Poisson ratio: torsional and bending
    // stiffness coincide, so the applied moment is parallel to the target
    // curvature and the wound state has constant material curvature.
    CrossSection cs;
    cs.EA = kPi;
    cs.GA2 = cs.GA3 = 0.5 * kPi;
    cs.GIt = cs.EI2 = cs.EI3 = 0.25 * kPi;

    const FrameCurve line{[](double) { return Rotation::identity(); }, Vec3(0.0, -r0, 0.0),
                          length};

    RunOutput out;
    out.mesh = mesh_from_curve(line, nelem, k, cs);
    out.layout = dof_layout(out.mesh, k, true);
    out.monitor_node = nelem;

    const double denom = r0 * (1.0 + slope * slope);
    const Vec3 tip_moment(cs.GIt * slope / denom, 0.0, cs.EI3 / denom);

    std::vector<Phase> phases(1);
    phases[0].bcs = {clamp_position(out.mesh, 0),
                     BoundaryCondition{0, Constraint::kRotation, Vec3::Zero(),
                                       -std::atan(slope) * Vec3::UnitY()}};
    phases[0].ramped.moments.push_back({nelem, tip_moment, MomentFrame::kMaterial});
    phases[0].steps = 20;

    SolverOptions opts;
    opts.residual_tolerance = 1e-12;
    opts.increment_tolerance = 1e-12;

    out.state = reference_state(out.mesh, out.layout);
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, phases, opts));
    out.monitor_displacement = tip_displacement(out.mesh, out.layout, out.state, nelem);

    const double rate = 1.0 / (r0 * std::sqrt(1.0 + slope * slope));
    const auto exact = [=](double s) -> Vec3 {
        const double theta = rate * s;
        return {r0 * std::sin(theta), -r0 * std::cos(theta), slope * r0 * theta};
    };
    out.error = error_l2_position(out.mesh, out.layout, out.state, exact, length);
    return out;
}

RunOutput run_helical(int k, int nelem) {
    require_positive(k, nelem);
    const double length = 10.0;
    CrossSection cs;
    cs.EA = cs.GA2 = cs.GA3 = 1e4;
    cs.GIt = cs.EI2 = cs.EI3 = 1e2;

    RunOutput out;
    out.mesh = build_straight(length, nelem, k, cs);
    out.layout = dof_layout(out.mesh, k, true);
    out.monitor_node = nelem;

    // Ten turns of bending moment plus an axial dead force along the moment
    // axis: the beam coils into a tight stack pulled out of plane.
    const double moment = 200.0 * kPi;

    std::vector<Phase> phases(1);
    phases[0].bcs = clamp(out.mesh, 0);
    phases[0].ramped.moments.push_back({nelem, moment * Vec3::UnitZ(), MomentFrame::kSpatial});
    phases[0].ramped.forces.push_back({nelem, 50.0 * Vec3::UnitZ()});
    phases[0].steps = 100;

    SolverOptions opts;
    opts.residual_tolerance = 1e-11;
    opts.increment_tolerance = 1e-11;
    opts.load_scale = moment;

    out.state = reference_state(out.mesh, out.layout);
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, phases, opts));
    out.monitor_displacement = tip_displacement(out.mesh, out.layout, out.state, nelem);
    return out;
}

RunOutput run_slope(int k, int nelem) {
    require_positive(k, nelem);
    if (nelem % 3 != 0) throw Error("the staircase needs an element count divisible by 3");
    CrossSection cs;
    cs.EA = 1e4;
    cs.GA2 = cs.GA3 = 5e3;
    cs.GIt = cs.EI2 = cs.EI3 = 100.0 / 12.0;

    const std::vector<Vec3> points = {
        {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {1.0, 1.0, 1.0}};

    RunOutput out;
    out.mesh = build_polyline(points, nelem / 3, k, cs);
    out.layout = dof_layout(out.mesh, k, true);
    out.monitor_node = nelem;

    std::vector<Phase> phases(1);
    phases[0].bcs = clamp(out.mesh, 0);
    phases[0].ramped.forces.push_back({nelem, -10.0 * Vec3(1.0, 0.0, 1.0)});
    phases[0].steps = 5;

    SolverOptions opts;
    opts.load_scale = 10.0 * std::sqrt(2.0);

    out.state = reference_state(out.mesh, out.layout);
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, phases, opts));
    out.monitor_displacement = tip_displacement(out.mesh, out.layout, out.state, nelem);
    return out;
}

RunOutput run_fork(int k, int nelem, bool swap_order) {
    require_positive(k, nelem);
    if (nelem % 3 != 0) throw Error("the fork needs an element count divisible by 3");
    const int n_limb = nelem / 3;
    CrossSection cs;
    cs.EA = cs.GA2 = cs.GA3 = 1e4;
    cs.GIt = cs.EI2 = cs.EI3 = 1e2;

    RunOutput out;
    out.mesh = build_fork(1.0, 1.0, n_limb, n_limb, k, cs);
    out.layout = dof_layout(out.mesh, k, true);
    const int p1 = 2 * n_limb;  // upper tine tip
    const int p2 = 3 * n_limb;  // lower tine tip
    out.monitor_node = p1;

    const PointForce up{p1, 200.0 * Vec3::UnitZ()};
    const PointForce down{p2, -200.0 * Vec3::UnitZ()};
    const PointForce& first = swap_order ? down : up;
    const PointForce& second = swap_order ? up : down;

    SolverOptions opts;
    opts.load_scale = 200.0;

    out.state = reference_state(out.mesh, out.layout);

    std::vector<Phase> leg(1);
    leg[0].bcs = clamp(out.mesh, 0);
    leg[0].ramped.forces = {first};
    leg[0].steps = 10;
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, leg, opts));

    const Vec3 mid = tip_displacement(out.mesh, out.layout, out.state, p1);
    out.series["u_p1_phase1"] = {mid.x(), mid.y(), mid.z()};

    leg[0].held.forces = {first};
    leg[0].ramped.forces = {second};
    accumulate(out.stats, run_continuation(out.mesh, out.layout, out.state, leg, opts));
    out.monitor_displacement = tip_displacement(out.mesh, out.layout, out.state, p1);
    return out;
}

const std::vector<std::string>& benchmark_names() {
    static const std::vector<std::string> names = {"rollup", "objectivity", "arc45", "helix",
                                                   "helical", "slope",       "fork"};
    return names;
}

std::vector<Vec3> sample_centerline(const Mesh& mesh, const DofLayout& layout,
                                    const Eigen::VectorXd& state, int per_element) {
    std::vector<Vec3> points;
    points.reserve(static_cast<std::size_t>(mesh.elements.size()) * per_element);
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const Eigen::VectorXd local = layout.gather(static_cast<int>(e), state);
        for (int j = 0; j < per_element; ++j) {
            const double xi = -1.0 + 2.0 * j / (per_element - 1);
            points.push_back(centerline_point(mesh.elements[e], local, xi));
        }
    }
    return points;
}

namespace {

struct CaseSpec {
    std::string name;
    int k = 0;
    int nelem = 0;
    double rho = kNaN;
    IntegrationScheme scheme = IntegrationScheme::kReduced;
};

RunOutput dispatch(const CaseSpec& spec) {
    if (spec.name == "rollup") return run_rollup(spec.k, spec.nelem, spec.rho, spec.scheme);
    if (spec.name == "objectivity") return run_objectivity(spec.k, spec.nelem, spec.rho);
    if (spec.name == "arc45") return run_arc45(spec.k, spec.nelem, spec.rho);
    if (spec.name == "helix") return run_helix(spec.k, spec.nelem);
    if (spec.name == "helical") return run_helical(spec.k, spec.nelem);
    if (spec.name == "slope") return run_slope(spec.k, spec.nelem);
    if (spec.name == "fork") return run_fork(spec.k, spec.nelem, false);
    throw Error("unknown benchmark: " + spec.name);
}

/// Expands user parameters into the list of configurations a benchmark runs
/// by default; explicit parameters always narrow the list.
std::vector<CaseSpec> expand(const std::string& name, const CaseParams& p) {
    const auto known = benchmark_names();
    if (std::find(known.begin(), known.end(), name) == known.end())
        throw Error("unknown benchmark: " + name);

    std::vector<CaseSpec> specs;
    if (name == "rollup") {
        const int k = p.k > 0 ? p.k : 2;
        const double rho = p.rho > 0.0 ? p.rho : 1000.0;
        std::vector<int> sizes;
        if (p.nelem > 0)
            sizes = {p.nelem};
        else
            for (int n = 8; n <= 512; n *= 2) sizes.push_back(n);
        for (int n : sizes) specs.push_back({name, k, n, rho, p.scheme});
    } else if (name == "objectivity") {
        specs.push_back({name, p.k > 0 ? p.k : 3, p.nelem > 0 ? p.nelem : 4,
                         p.rho > 0.0 ? p.rho : 10.0, p.scheme});
    } else if (name == "arc45") {
        const int k = p.k > 0 ? p.k : 4;
        const int n = p.nelem > 0 ? p.nelem : 32;
        std::vector<double> rhos;
        if (p.rho > 0.0)
            rhos = {p.rho};
        else
            rhos = {10.0, 100.0, 1000.0};
        for (double rho : rhos) specs.push_back({name, k, n, rho, p.scheme});
    } else if (name == "helix") {
        if (p.k > 0) {
            const int n = p.nelem > 0 ? p.nelem : (p.k == 1 ? 5 : 3);
            specs.push_back({name, p.k, n, kNaN, p.scheme});
        } else {
            specs.push_back({name, 1, p.nelem > 0 ? p.nelem : 5, kNaN, p.scheme});
            specs.push_back({name, 2, p.nelem > 0 ? p.nelem : 3, kNaN, p.scheme});
        }
    } else if (name == "helical") {
        specs.push_back({name, p.k > 0 ? p.k : 3, p.nelem > 0 ? p.nelem : 30, kNaN, p.scheme});
    } else if (name == "slope") {
        specs.push_back({name, p.k > 0 ? p.k : 4, p.nelem > 0 ? p.nelem : 24, kNaN, p.scheme});
    } else {  // fork
        specs.push_back({name, p.k > 0 ? p.k : 4, p.nelem > 0 ? p.nelem : 30, kNaN, p.scheme});
    }
    return specs;
}

}  // namespace


namespace {

bool within_componentwise(const Vec3& u, const Vec3& ref, const Vec3& tol) {
    return ((u - ref).cwiseAbs().array() <= tol.array()).all();
}

/// Analytic helical centerline point of the exactness benchmark at winding
/// angle theta: radius 10, total rise 50 over two coils.
Vec3 helix_point(double theta) {
    return {10.0 * std::sin(theta), -10.0 * std::cos(theta), 50.0 / (4.0 * kPi) * theta};
}

}  // namespace

void apply_oracles(std::vector<CaseRow>& rows) {
    for (CaseRow& row : rows) {
        if (row.benchmark == "arc45" && row.k == 4 && row.nelem == 32) {
            static const std::array<std::pair<double, Vec3>, 3> table = {{
                {10.0, {-23.64501, -13.63207, 54.09503}},
                {100.0, {-23.56024, -13.60452, 53.47486}},
                {1000.0, {-23.55939, -13.60425, 53.46866}},
            }};
            for (const auto& [rho, ref] : table)
                if (row.rho == rho)
                    row.oracle =
                        within_componentwise(row.u, ref, 1e-3 * ref.cwiseAbs()) ? 1 : 0;
        } else if (row.benchmark == "slope" && row.nelem == 24 &&
                   (row.k == 4 || row.k == 1)) {
            const Vec3 ref = row.k == 4 ? Vec3(-1.535072, -0.1758755, -2.484219)
                                        : Vec3(-1.534489, -0.1759337, -2.485712);
            const double tol = row.k == 4 ? 1e-4 : 1e-3;
            row.oracle = within_componentwise(row.u, ref, Vec3::Constant(tol)) ? 1 : 0;
        } else if (row.benchmark == "helical" && row.k == 3 && row.nelem == 30) {
            row.oracle = within_componentwise(row.u, {4.803e-3, 7.248e-5, -7.647e-2},
                                              {1e-5, 1e-6, 1e-4})
                             ? 1
                             : 0;
        } else if (row.benchmark == "helix" && !row.centerline.empty()) {
            // Nodes must land on the analytic helix; samples between nodes are
            // polynomial interpolants and legitimately deviate.
            const int per = static_cast<int>(row.centerline.size()) / row.nelem;
            if (row.k == 1 && row.nelem == 5) {
                const Vec3 tip = row.centerline.back();
                row.oracle = (tip - helix_point(4.0 * kPi)).norm() <= 1e-8 ? 1 : 0;
            } else if (row.k == 2 && row.nelem == 3) {
                bool ok = true;
                for (int node = 0; node <= row.nelem; ++node) {
                    const int sample = node == 0 ? 0 : node * per - 1;
                    const double theta = 4.0 * kPi * node / row.nelem;
                    ok = ok &&
                         (row.centerline[sample] - helix_point(theta)).norm() <= 1e-8;
                }
                row.oracle = ok ? 1 : 0;
            }
        } else if (row.benchmark == "objectivity") {
            const auto u3 = row.series.find("u3");
            const auto phi = row.series.find("phi");
            if (u3 == row.series.end() || phi == row.series.end() ||
                u3->second.empty() || phi->second.empty()) {
                row.oracle = 0;
                continue;
            }
            const double arc_length = 0.5 * kPi * 10.0;
            double du = 0.0, dphi = 0.0;
            for (double v : u3->second) du = std::max(du, std::abs(v - u3->second.front()));
            for (double v : phi->second)
                dphi = std::max(dphi, std::abs(v - phi->second.front()));
            row.oracle = (du <= 1e-9 * arc_length &&
                          dphi <= 1e-9 * std::abs(phi->second.front()))
                             ? 1
                             : 0;
        } else if (row.benchmark == "fork" && row.k == 4 && row.nelem == 30) {
            const auto mid = row.series.find("u_p1_phase1");
            bool ok = mid != row.series.end() && mid->second.size() == 3;
            if (ok) {
                const Vec3 after_first(mid->second[0], mid->second[1], mid->second[2]);
                ok = within_componentwise(after_first, {-1.088614, -0.746307, 1.978301},
                                          Vec3::Constant(1e-4)) &&
                     within_componentwise(row.u, {-0.598829, -0.727134, 1.479860},
                                          Vec3::Constant(1e-4));
            }
            row.oracle = ok ? 1 : 0;
        }
    }
}

std::vector<CaseRow> benchmark_rows(const std::string& name, const CaseParams& params) {
    std::vector<CaseRow> rows;
    double previous_error = kNaN;
    for (const CaseSpec& spec : expand(name, params)) {
        const auto start = std::chrono::steady_clock::now();
        RunOutput run = dispatch(spec);
        const auto stop = std::chrono::steady_clock::now();

        CaseRow row;
        row.benchmark = spec.name;
        row.k = spec.k;
        row.nelem = spec.nelem;
        row.rho = spec.rho;
        row.scheme = spec.scheme;
        row.e_l2 = run.error;
        row.u = run.monitor_displacement;
        row.newton_total_iters = run.stats.newton_iterations;
        if (params.timings)
            row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        row.centerline = sample_centerline(run.mesh, run.layout, run.state);
        row.series = std::move(run.series);

        // Pairwise observed order against the previous ladder entry.
        if (rows.size() > 0 && rows.back().nelem * 2 == spec.nelem &&
            std::isfinite(previous_error) && run.error > 0.0)
            row.rate = std::log2(previous_error / run.error);
        previous_error = run.error;
        rows.push_back(std::move(row));
    }
    apply_oracles(rows);
    return rows;
}

}  // namespace beamfe::bench
