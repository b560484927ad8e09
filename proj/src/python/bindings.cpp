#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "beamfe/benchmarks.hpp"
#include "beamfe/constitutive.hpp"
#include "beamfe/legendre.hpp"
#include "beamfe/mesh.hpp"
#include "beamfe/problem_io.hpp"
#include "beamfe/report.hpp"
#include "beamfe/so3.hpp"
#include "beamfe/solver.hpp"
#include "beamfe/version.hpp"

namespace py = pybind11;

namespace {

using namespace beamfe;

Eigen::MatrixX3d node_positions(const Mesh& mesh) {
    Eigen::MatrixX3d out(static_cast<Eigen::Index>(mesh.nodes.size()), 3);
    for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = mesh.nodes[i].position;
    return out;
}

ArcPlane plane_from_name(const std::string& name) {
    if (name == "xy") return ArcPlane::kXY;
    if (name == "xz") return ArcPlane::kXZ;
    if (name == "yz") return ArcPlane::kYZ;
    throw Error("unknown arc plane '" + name + "' (expected xy, xz, or yz)");
}

py::dict solve_problem(const std::string& text) {
    const io::ProblemDocument doc = io::parse_problem(text);
    const Mesh mesh = io::build_mesh(doc);
    const DofLayout layout = dof_layout(mesh, doc.order, doc.options.condense);

    std::vector<Phase> phases(1);
    phases[0].bcs = doc.bcs;
    phases[0].ramped = doc.loads;
    phases[0].steps = doc.steps;

    Eigen::VectorXd x = reference_state(mesh, layout);
    const RunReport report = run_continuation(mesh, layout, x, phases, doc.options);

    const Eigen::Index n = static_cast<Eigen::Index>(mesh.nodes.size());
    Eigen::MatrixX3d positions(n, 3), rotations(n, 3);
    for (Eigen::Index node = 0; node < n; ++node) {
        const int base = layout.node_position(static_cast<int>(node));
        positions.row(node) = x.segment<3>(base);
        rotations.row(node) = x.segment<3>(base + 3);
    }

    py::dict out;
    out["positions"] = positions;
    out["rotations"] = rotations;
    out["total_steps"] = report.total_steps;
    out["total_iterations"] = report.total_iterations;
    return out;
}

py::dict row_to_dict(const bench::CaseRow& row) {
    py::dict d;
    d["benchmark"] = row.benchmark;
    d["k"] = row.k;
    d["nelem"] = row.nelem;
    d["rho"] = row.rho;
    d["integration"] = std::string(report::scheme_name(row.scheme));
    d["e_l2"] = row.e_l2;
    d["rate"] = row.rate;
    d["u"] = Vec3(row.u);
    d["newton_total_iters"] = row.newton_total_iters;
    d["wall_ms"] = row.wall_ms;
    if (row.oracle >= 0)
        d["oracle"] = row.oracle == 1;
    else
        d["oracle"] = py::none();
    Eigen::MatrixX3d centerline(static_cast<Eigen::Index>(row.centerline.size()), 3);
    for (Eigen::Index i = 0; i < centerline.rows(); ++i) centerline.row(i) = row.centerline[i];
    d["centerline"] = centerline;
    py::dict series;
    for (const auto& [key, values] : row.series) series[py::str(key)] = values;
    d["series"] = series;
    return d;
}

py::list run_benchmark(const std::string& name, int k, int nelem, double rho,
                       const std::string& integration, bool timings) {
    bench::CaseParams params;
    params.k = k;
    params.nelem = nelem;
    params.rho = rho;
    params.scheme = report::scheme_from_name(integration);
    params.timings = timings;
    py::list out;
    for (const bench::CaseRow& row : bench::benchmark_rows(name, params)) out.append(row_to_dict(row));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mixed finite elements for geometrically exact rods";
    m.attr("__version__") = kVersion;

    const auto base = py::register_exception<Error>(m, "BeamError");
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<NonConvergence>(m, "NonConvergence", base);

    // --- rotation algebra (matrices in, matrices out) ---
    m.def(
        "exp_rotvec", [](const Vec3& psi) -> Mat3 { return exp_rotvec(psi).matrix(); },
        py::arg("psi"), "Rotation matrix for the rotation vector psi.");
    m.def(
        "log_rotation", [](const Mat3& r) -> Vec3 { return log_rotation(Rotation::from_matrix(r)); },
        py::arg("matrix"), "Principal rotation vector of an orthogonal matrix, |result| <= pi.");
    m.def("tangent_map", &tangent_map, py::arg("psi"),
          "Tangent map T(psi): d(exp psi) exp(psi)^T = skew(T(psi) dpsi).");
    m.def("skew", &skew, py::arg("v"), "Skew-symmetric matrix of v.");
    m.def(
        "relative_rotvec",
        [](const Mat3& a, const Mat3& b) -> Vec3 {
            return relative_rotvec(Rotation::from_matrix(a), Rotation::from_matrix(b));
        },
        py::arg("a"), py::arg("b"), "Rotation vector of a^T b.");

    // --- section and strain measures ---
    py::class_<CrossSection>(m, "CrossSection")
        .def(py::init([](double ea, double ga2, double ga3, double git, double ei2, double ei3) {
                 CrossSection cs{ea, ga2, ga3, git, ei2, ei3};
                 cs.validate();
                 return cs;
             }),
             py::arg("EA"), py::arg("GA2"), py::arg("GA3"), py::arg("GIt"), py::arg("EI2"),
             py::arg("EI3"))
        .def_readwrite("EA", &CrossSection::EA)
        .def_readwrite("GA2", &CrossSection::GA2)
        .def_readwrite("GA3", &CrossSection::GA3)
        .def_readwrite("GIt", &CrossSection::GIt)
        .def_readwrite("EI2", &CrossSection::EI2)
        .def_readwrite("EI3", &CrossSection::EI3)
        .def("__repr__", [](const CrossSection& cs) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "CrossSection(EA=%g, GA2=%g, GA3=%g, GIt=%g, EI2=%g, EI3=%g)", cs.EA,
                          cs.GA2, cs.GA3, cs.GIt, cs.EI2, cs.EI3);
            return std::string(buf);
        });
    m.def(
        "force_strain",
        [](const Mat3& lambda, const Vec3& r_prime) -> Vec3 {
            return force_strain(Rotation::from_matrix(lambda), r_prime);
        },
        py::arg("frame"), py::arg("r_prime"),
        "Material force strain gamma = frame^T r' - e1.");
    m.def("curvature_local", &curvature_local, py::arg("psi"), py::arg("psi_prime"),
          py::arg("psi0"), py::arg("psi0_prime"),
          "Material moment strain kappa = T^T(psi) psi' - T^T(psi0) psi0'.");
    m.def("energy_gamma", &energy_gamma, py::arg("gamma"), py::arg("section"),
          "Force-strain energy density 1/2 gamma . C_gamma . gamma.");
    m.def("dual_energy_kappa", &dual_energy_kappa, py::arg("moment"), py::arg("kappa"),
          py::arg("section"),
          "Dual moment energy density -1/2 M . C_kappa^-1 . M + kappa . M.");

    // --- quadrature ---
    m.def(
        "gauss_rule",
        [](int n) {
            const QuadratureRule& rule = gauss_rule(n);
            return py::make_tuple(Eigen::VectorXd(rule.points), Eigen::VectorXd(rule.weights));
        },
        py::arg("n"), "(points, weights) of the n-point Gauss-Legendre rule on [-1, 1].");

    // --- meshes ---
    py::class_<Mesh>(m, "Mesh")
        .def_readonly("order", &Mesh::order)
        .def_property_readonly(
            "n_nodes", [](const Mesh& mesh) { return static_cast<int>(mesh.nodes.size()); })
        .def_property_readonly(
            "n_elements", [](const Mesh& mesh) { return static_cast<int>(mesh.elements.size()); })
        .def("length", &Mesh::length)
        .def("node_positions", &node_positions, "Node coordinates as an (n_nodes, 3) array.")
        .def("__repr__", [](const Mesh& mesh) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "Mesh(order=%d, nodes=%zu, elements=%zu)", mesh.order,
                          mesh.nodes.size(), mesh.elements.size());
            return std::string(buf);
        });
    m.def("build_straight", &build_straight, py::arg("length"), py::arg("nelem"), py::arg("k"),
          py::arg("section"), "Straight beam along e1 from the origin.");
    m.def(
        "build_arc",
        [](double radius, double angle, const std::string& plane, int n, int k,
           const CrossSection& cs) {
            return build_arc(radius, angle, plane_from_name(plane), n, k, cs);
        },
        py::arg("radius"), py::arg("angle"), py::arg("plane"), py::arg("nelem"), py::arg("k"),
        py::arg("section"),
        "Circular arc; plane is 'xy', 'xz', or 'yz' (start tangent along the first axis).");
    m.def("build_helix", &build_helix, py::arg("radius"), py::arg("height"), py::arg("n_coils"),
          py::arg("nelem"), py::arg("k"), py::arg("section"),
          "Helix around the z axis starting at (radius, 0, 0).");
    m.def("build_polyline", &build_polyline, py::arg("points"), py::arg("n_per_segment"),
          py::arg("k"), py::arg("section"), "Chain of straight segments through the points.");
    m.def("build_fork", &build_fork, py::arg("shaft_length"), py::arg("tine_radius"),
          py::arg("n_shaft"), py::arg("n_tine"), py::arg("k"), py::arg("section"),
          "Straight shaft plus two quarter-circle tines sharing the branch vertex.");

    // --- solving and benchmarks ---
    m.def("solve_problem", &solve_problem, py::arg("text"),
          "Solves a problem document given as text; returns positions, rotations, and "
          "iteration counts.");
    m.def("benchmark_names", [] { return bench::benchmark_names(); },
          "Names accepted by run_benchmark.");
    m.def("run_benchmark", &run_benchmark, py::arg("name"), py::arg("k") = 0,
          py::arg("nelem") = 0, py::arg("rho") = 0.0, py::arg("integration") = "reduced",
          py::arg("timings") = false,
          "Runs a named benchmark; unset parameters take the benchmark's defaults. Returns "
          "one dict per solved case; 'oracle' is True/False where an embedded reference "
          "applies and None otherwise.");
}
