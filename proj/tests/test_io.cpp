#include <doctest.h>

#include <cmath>

#include "beamfe/problem_io.hpp"
#include "beamfe/report.hpp"

using namespace beamfe;

TEST_CASE("fnv-1a matches the published reference vectors") {
    CHECK(report::fnv1a("") == 14695981039346656037ull);
    CHECK(report::fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(report::fnv1a("foobar") == 0x85944171f73967e8ull);

    bench::CaseRow row;
    row.benchmark = "rollup";
    row.k = 2;
    row.nelem = 16;
    row.rho = 1000.0;
    const std::uint64_t h = report::config_hash(row);
    row.k = 3;
    CHECK(report::config_hash(row) != h);
}

TEST_CASE("csv tables carry the fixed schema with nan placeholders") {
    bench::CaseRow a;
    a.benchmark = "rollup";
    a.k = 2;
    a.nelem = 16;
    a.rho = 1000.0;
    a.e_l2 = 1.25e-5;
    a.rate = 3.0;
    a.u = Vec3(-1.0, 0.5, 0.0);
    a.newton_total_iters = 17;

    bench::CaseRow b;
    b.benchmark = "slope";
    b.k = 4;
    b.nelem = 24;
    b.scheme = IntegrationScheme::kFull;
    b.rho = std::numeric_limits<double>::quiet_NaN();
    b.u = Vec3(-1.535072, -0.1758755, -2.484219);
    b.newton_total_iters = 23;

    const std::string csv = report::to_csv({a, b});
    const std::string header =
        "benchmark,k,nelem,rho,integration,e_l2,rate,u1,u2,u3,newton_total_iters,wall_ms";
    CHECK(csv.substr(0, header.size()) == header);
    CHECK(csv.find("rollup,2,16,1000,reduced,1.25e-05,3,-1,0.5,0,17,0") != std::string::npos);
    CHECK(csv.find("slope,4,24,nan,full,nan,nan,-1.535072,-0.1758755,-2.484219,23,0") !=
          std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("json reports round-trip every field and reject tampered rows") {
    bench::CaseParams p;
    p.k = 2;
    p.nelem = 8;
    p.rho = 100.0;
    auto rows = bench::benchmark_rows("arc45", p);
    REQUIRE(rows.size() == 1);
    rows[0].series["probe"] = {1.0, 2.5, -3.0};
    rows[0].rate = 2.125;

    const std::string text = report::to_json(rows);
    const auto back = report::rows_from_json(text);
    REQUIRE(back.size() == 1);
    const auto& r = back[0];
    CHECK(r.benchmark == rows[0].benchmark);
    CHECK(r.k == rows[0].k);
    CHECK(r.nelem == rows[0].nelem);
    CHECK(r.rho == rows[0].rho);
    CHECK(r.scheme == rows[0].scheme);
    CHECK(std::isnan(r.e_l2));
    CHECK(r.rate == rows[0].rate);
    CHECK(r.u == rows[0].u);
    CHECK(r.newton_total_iters == rows[0].newton_total_iters);
    REQUIRE(r.centerline.size() == rows[0].centerline.size());
    for (std::size_t i = 0; i < r.centerline.size(); ++i)
        CHECK(r.centerline[i] == rows[0].centerline[i]);
    CHECK(r.series.at("probe") == rows[0].series.at("probe"));

    // flipping the order in the text invalidates the configuration hash
    std::string tampered = text;
    const auto pos = tampered.find("\"k\": 2");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 6, "\"k\": 3");
    CHECK_THROWS_AS(report::rows_from_json(tampered), ParseError);
    CHECK_THROWS_AS(report::rows_from_json("{\"rows\": 1}"), ParseError);
    CHECK_THROWS_AS(report::rows_from_json("not json"), ParseError);
}

namespace {

io::ProblemDocument sample_problem() {
    io::ProblemDocument doc;
    doc.builder = "arc";
    doc.radius = 2.5;
    doc.angle = 0.75;
    doc.plane = "xz";
    doc.nelem = 3;
    doc.order = 2;
    doc.section.EA = 100.0;
    doc.section.GA2 = 50.0;
    doc.section.GA3 = 55.0;
    doc.section.GIt = 7.5;
    doc.section.EI2 = 8.0;
    doc.section.EI3 = 9.0;
    doc.bcs.push_back({0, Constraint::kPosition, Vec3::Zero(), Vec3::Zero()});
    doc.bcs.push_back({0, Constraint::kRotation, Vec3::Zero(), Vec3(0.0, 0.0, 1.5)});
    doc.loads.forces.push_back({3, Vec3(0.0, -2.0, 1.0)});
    doc.loads.moments.push_back({3, Vec3(0.5, 0.0, 0.0), MomentFrame::kMaterial});
    return doc;
}

}  // namespace

TEST_CASE("problem documents round-trip through their text form") {
    io::ProblemDocument doc = sample_problem();
    DistributedLoad dl;
    dl.element = 1;
    dl.load.force_left = Vec3(0.1, 0.2, 0.3);
    dl.load.force_right = Vec3(-0.1, 0.0, 0.0);
    dl.load.couple = Vec3(0.0, 0.05, 0.0);
    doc.loads.distributed.push_back(dl);
    doc.steps = 7;
    doc.options.residual_tolerance = 1e-9;
    doc.options.increment_tolerance = 2e-9;
    doc.options.load_scale = 2.0;
    doc.options.max_iterations = 33;
    doc.options.max_bisection_depth = 4;
    doc.options.condense = false;
    doc.options.scheme = IntegrationScheme::kFull;

    const std::string text = io::write_problem(doc);
    const io::ProblemDocument back = io::parse_problem(text);

    CHECK(back.builder == doc.builder);
    CHECK(back.radius == doc.radius);
    CHECK(back.angle == doc.angle);
    CHECK(back.plane == doc.plane);
    CHECK(back.nelem == doc.nelem);
    CHECK(back.order == doc.order);
    CHECK(back.section.EA == doc.section.EA);
    CHECK(back.section.GIt == doc.section.GIt);
    REQUIRE(back.bcs.size() == 2);
    CHECK(back.bcs[1].kind == Constraint::kRotation);
    CHECK(back.bcs[1].target == doc.bcs[1].target);
    REQUIRE(back.loads.forces.size() == 1);
    CHECK(back.loads.forces[0].force == doc.loads.forces[0].force);
    REQUIRE(back.loads.moments.size() == 1);
    CHECK(back.loads.moments[0].frame == MomentFrame::kMaterial);
    REQUIRE(back.loads.distributed.size() == 1);
    CHECK(back.loads.distributed[0].element == 1);
    CHECK(back.loads.distributed[0].load.couple == dl.load.couple);
    CHECK(back.steps == doc.steps);
    CHECK(back.options.residual_tolerance == doc.options.residual_tolerance);
    CHECK(back.options.condense == false);
    CHECK(back.options.scheme == IntegrationScheme::kFull);

    // writing the parsed document again is byte-identical (canonical form)
    CHECK(io::write_problem(back) == text);
}

TEST_CASE("polyline and fork geometries round-trip and build") {
    io::ProblemDocument doc;
    doc.builder = "polyline";
    doc.points = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
    doc.nelem = 2;
    doc.order = 1;
    doc.section = {10.0, 5.0, 5.0, 1.0, 1.0, 1.0};
    const io::ProblemDocument back = io::parse_problem(io::write_problem(doc));
    REQUIRE(back.points.size() == 3);
    CHECK(back.points[2] == doc.points[2]);
    CHECK(io::build_mesh(back).elements.size() == 4);

    io::ProblemDocument fork;
    fork.builder = "fork";
    fork.shaft_length = 1.0;
    fork.radius = 1.0;
    fork.n_shaft = 2;
    fork.n_tine = 2;
    fork.order = 1;
    fork.section = doc.section;
    const io::ProblemDocument fork_back = io::parse_problem(io::write_problem(fork));
    CHECK(fork_back.n_tine == 2);
    CHECK(io::build_mesh(fork_back).nodes.size() == 7);
}

TEST_CASE("problem parsing rejects malformed documents") {
    using io::parse_problem;
    const std::string good =
        "[geometry]\nbuilder = straight\nlength = 1\nnelem = 2\norder = 1\n"
        "[cross_section]\nEA = 1\nGA2 = 1\nGA3 = 1\nGIt = 1\nEI2 = 1\nEI3 = 1\n";

    CHECK_NOTHROW(parse_problem(good));
    CHECK_THROWS_AS(parse_problem("length = 1\n"), ParseError);           // entry before section
    CHECK_THROWS_AS(parse_problem("[geometry\nlength = 1\n"), ParseError);  // unterminated header
    CHECK_THROWS_AS(parse_problem(good + "[physics]\n"), ParseError);     // unknown section
    CHECK_THROWS_AS(parse_problem(good + "[solver]\nwarp = 1\n"), ParseError);  // unknown key
    CHECK_THROWS_AS(parse_problem("[geometry]\nnelem = 2\nnelem = 3\n"), ParseError);  // duplicate
    CHECK_THROWS_AS(parse_problem("[geometry]\nnelem = two\n"), ParseError);  // bad integer
    CHECK_THROWS_AS(parse_problem("[geometry]\nlength = 1 m\n"), ParseError);  // trailing junk
    CHECK_THROWS_AS(parse_problem("[geometry]\nlength =\n"), ParseError);   // empty value
    CHECK_THROWS_AS(parse_problem(good + "[bc]\nnode = 0\n"), ParseError);  // bc without kind
    CHECK_THROWS_AS(parse_problem(good + "[bc]\nnode = 0\nkind = twist\n"), ParseError);
    CHECK_THROWS_AS(parse_problem(good + "[bc]\nnode = 0\nkind = position\nbase = [1, 2]\n"),
                    ParseError);  // wrong arity
    CHECK_THROWS_AS(parse_problem(good + "[load]\nforce = [1, 0, 0]\n"), ParseError);  // no target
    CHECK_THROWS_AS(
        parse_problem(good + "[load]\nnode = 1\nelement = 0\nforce = [1, 0, 0]\n"),
        ParseError);  // both node and element
    CHECK_THROWS_AS(parse_problem(good + "[load]\nnode = 1\n"), ParseError);  // no components
    CHECK_THROWS_AS(
        parse_problem(good + "[load]\nnode = 1\nforce = [1, 0, 0]\nmoment = [1, 0, 0]\n"),
        ParseError);
    CHECK_THROWS_AS(
        parse_problem(good + "[load]\nnode = 1\nforce = [1, 0, 0]\nframe = spatial\n"),
        ParseError);  // frame on a force
    CHECK_THROWS_AS(parse_problem(good + "[load]\nelement = 0\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("[cross_section]\nEA = 1\n"), ParseError);  // no geometry
    CHECK_THROWS_AS(parse_problem("[geometry]\nbuilder = straight\n"), ParseError);  // no section
}

TEST_CASE("a parsed problem document solves end to end") {
    const std::string text =
        "# straight cantilever with a transverse tip force\n"
        "[geometry]\n"
        "builder = straight\n"
        "length = 2\n"
        "nelem = 2\n"
        "order = 2\n"
        "\n"
        "[cross_section]\n"
        "EA = 1000\nGA2 = 1000\nGA3 = 1000\nGIt = 10\nEI2 = 10\nEI3 = 10\n"
        "\n"
        "[bc]\n"
        "node = 0\n"
        "kind = position\n"
        "base = [0, 0, 0]\n"
        "target = [0, 0, 0]\n"
        "\n"
        "[bc]\n"
        "node = 0\n"
        "kind = rotation\n"
        "base = [0, 0, 0]\n"
        "target = [0, 0, 0]\n"
        "\n"
        "[load]\n"
        "node = 2\n"
        "force = [0, 1.5, 0]\n"
        "\n"
        "[solver]\n"
        "steps = 3\n";

    const io::ProblemDocument doc = io::parse_problem(text);
    const Mesh mesh = io::build_mesh(doc);
    const DofLayout layout = dof_layout(mesh, doc.order, doc.options.condense);

    std::vector<Phase> phases(1);
    phases[0].ramped = doc.loads;
    phases[0].bcs = doc.bcs;
    phases[0].steps = doc.steps;

    Eigen::VectorXd x = reference_state(mesh, layout);
    const RunReport report = run_continuation(mesh, layout, x, phases, doc.options);
    CHECK(report.total_steps == 3);
    CHECK(x(layout.node_position(2) + 1) > 0.1);  // tip moved with the force
    CHECK(x(layout.node_position(0)) == 0.0);     // clamp pinned
}

TEST_CASE("sweep specifications parse into case lists") {
    const std::string text =
        "# two configurations\n"
        "[case]\n"
        "benchmark = rollup\n"
        "k = 2\n"
        "nelem = 16\n"
        "rho = 100\n"
        "integration = full\n"
        "\n"
        "[case]\n"
        "benchmark = slope\n";

    const auto cases = io::parse_sweep(text);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].benchmark == "rollup");
    CHECK(cases[0].params.k == 2);
    CHECK(cases[0].params.nelem == 16);
    CHECK(cases[0].params.rho == 100.0);
    CHECK(cases[0].params.scheme == IntegrationScheme::kFull);
    CHECK(cases[1].benchmark == "slope");
    CHECK(cases[1].params.k == 0);

    CHECK_THROWS_AS(io::parse_sweep(""), ParseError);
    CHECK_THROWS_AS(io::parse_sweep("[case]\nbenchmark = rollup\nwhat = 1\n"), ParseError);
    CHECK_THROWS_AS(io::parse_sweep("[sweep]\nbenchmark = rollup\n"), ParseError);
    CHECK_THROWS_AS(io::parse_sweep("[case]\nk = 2\n"), ParseError);
}
