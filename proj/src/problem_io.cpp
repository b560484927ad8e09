#include "beamfe/problem_io.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "beamfe/report.hpp"

namespace beamfe::io {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    std::vector<Entry> entries;
    int line = 0;

    const Entry* find(const std::string& key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    }
};

[[noreturn]] void fail(int line, const std::string& message) {
    throw ParseError("line " + std::to_string(line) + ": " + message);
}

/// Splits a document into [name] sections of key = value entries, keeping
/// repeated sections separate and rejecting duplicate keys within one.
std::vector<Section> split_sections(const std::string& text) {
    std::vector<Section> sections;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (name.empty()) fail(line, "empty section name");
            sections.push_back({name, {}, line});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        if (sections.empty()) fail(line, "entry before any section header");
        Entry entry{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
        if (entry.key.empty()) fail(line, "empty key");
        if (entry.value.empty()) fail(line, "empty value for key " + entry.key);
        if (sections.back().find(entry.key))
            fail(line, "duplicate key " + entry.key + " in section " + sections.back().name);
        sections.back().entries.push_back(std::move(entry));
    }
    return sections;
}

double parse_double(const Entry& e) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(e.value, &used);
    } catch (const std::exception&) {
        fail(e.line, "expected a number for " + e.key);
    }
    if (used != e.value.size()) fail(e.line, "trailing characters after number for " + e.key);
    return v;
}

int parse_int(const Entry& e) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(e.value, &used);
    } catch (const std::exception&) {
        fail(e.line, "expected an integer for " + e.key);
    }
    if (used != e.value.size()) fail(e.line, "trailing characters after integer for " + e.key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        fail(e.line, "integer out of range for " + e.key);
    return static_cast<int>(v);
}

bool parse_bool(const Entry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    fail(e.line, "expected true or false for " + e.key);
}

std::vector<double> parse_array(const Entry& e) {
    const std::string& s = e.value;
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        fail(e.line, "expected a bracketed array for " + e.key);
    std::vector<double> values;
    std::string body = s.substr(1, s.size() - 2);
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) fail(e.line, "empty array element for " + e.key);
        std::size_t used = 0;
        try {
            values.push_back(std::stod(t, &used));
        } catch (const std::exception&) {
            fail(e.line, "expected numbers in array for " + e.key);
        }
        if (used != t.size()) fail(e.line, "expected numbers in array for " + e.key);
    }
    return values;
}

Vec3 parse_vec3(const Entry& e) {
    const auto v = parse_array(e);
    if (v.size() != 3) fail(e.line, e.key + " needs exactly 3 components");
    return Vec3(v[0], v[1], v[2]);
}

void check_keys(const Section& sec, const std::set<std::string>& allowed) {
    for (const auto& e : sec.entries)
        if (!allowed.count(e.key))
            fail(e.line, "unknown key " + e.key + " in section " + sec.name);
}

void read_geometry(const Section& sec, ProblemDocument& doc) {
    check_keys(sec, {"builder", "length", "radius", "angle", "plane", "height", "coils",
                     "shaft_length", "points", "nelem", "n_shaft", "n_tine", "order"});
    for (const auto& e : sec.entries) {
        if (e.key == "builder") doc.builder = e.value;
        else if (e.key == "length") doc.length = parse_double(e);
        else if (e.key == "radius") doc.radius = parse_double(e);
        else if (e.key == "angle") doc.angle = parse_double(e);
        else if (e.key == "plane") doc.plane = e.value;
        else if (e.key == "height") doc.height = parse_double(e);
        else if (e.key == "coils") doc.coils = parse_double(e);
        else if (e.key == "shaft_length") doc.shaft_length = parse_double(e);
        else if (e.key == "nelem") doc.nelem = parse_int(e);
        else if (e.key == "n_shaft") doc.n_shaft = parse_int(e);
        else if (e.key == "n_tine") doc.n_tine = parse_int(e);
        else if (e.key == "order") doc.order = parse_int(e);
        else {  // points
            const auto flat = parse_array(e);
            if (flat.empty() || flat.size() % 3 != 0)
                fail(e.line, "points needs a multiple of 3 numbers");
            for (std::size_t i = 0; i < flat.size(); i += 3)
                doc.points.emplace_back(flat[i], flat[i + 1], flat[i + 2]);
        }
    }
}

void read_cross_section(const Section& sec, ProblemDocument& doc) {
    check_keys(sec, {"EA", "GA2", "GA3", "GIt", "EI2", "EI3"});
    for (const auto& e : sec.entries) {
        const double v = parse_double(e);
        if (e.key == "EA") doc.section.EA = v;
        else if (e.key == "GA2") doc.section.GA2 = v;
        else if (e.key == "GA3") doc.section.GA3 = v;
        else if (e.key == "GIt") doc.section.GIt = v;
        else if (e.key == "EI2") doc.section.EI2 = v;
        else doc.section.EI3 = v;
    }
}

void read_bc(const Section& sec, ProblemDocument& doc) {
    check_keys(sec, {"node", "kind", "base", "target"});
    BoundaryCondition bc;
    bool has_node = false, has_kind = false;
    for (const auto& e : sec.entries) {
        if (e.key == "node") {
            bc.node = parse_int(e);
            has_node = true;
        } else if (e.key == "kind") {
            if (e.value == "position") bc.kind = Constraint::kPosition;
            else if (e.value == "rotation") bc.kind = Constraint::kRotation;
            else fail(e.line, "kind must be position or rotation");
            has_kind = true;
        } else if (e.key == "base") {
            bc.base = parse_vec3(e);
        } else {
            bc.target = parse_vec3(e);
        }
    }
    if (!has_node || !has_kind) fail(sec.line, "bc needs node and kind");
    doc.bcs.push_back(bc);
}

void read_load(const Section& sec, ProblemDocument& doc) {
    check_keys(sec, {"node", "force", "moment", "frame", "element", "force_left", "force_right",
                     "couple"});
    const bool nodal = sec.find("node") != nullptr;
    const bool distributed = sec.find("element") != nullptr;
    if (nodal == distributed) fail(sec.line, "load needs exactly one of node or element");

    if (nodal) {
        const int node = parse_int(*sec.find("node"));
        const Entry* force = sec.find("force");
        const Entry* moment = sec.find("moment");
        const Entry* frame = sec.find("frame");
        if (sec.find("force_left") || sec.find("force_right") || sec.find("couple"))
            fail(sec.line, "distributed components on a nodal load");
        if (static_cast<bool>(force) == static_cast<bool>(moment))
            fail(sec.line, "nodal load needs exactly one of force or moment");
        if (force) {
            if (frame) fail(frame->line, "frame applies to moments only");
            doc.loads.forces.push_back({node, parse_vec3(*force)});
        } else {
            PointMoment pm{node, parse_vec3(*moment), MomentFrame::kSpatial};
            if (frame) {
                if (frame->value == "material") pm.frame = MomentFrame::kMaterial;
                else if (frame->value != "spatial")
                    fail(frame->line, "frame must be spatial or material");
            }
            doc.loads.moments.push_back(pm);
        }
    } else {
        if (sec.find("force") || sec.find("moment") || sec.find("frame"))
            fail(sec.line, "nodal components on a distributed load");
        DistributedLoad dl;
        dl.element = parse_int(*sec.find("element"));
        bool any = false;
        if (const Entry* e = sec.find("force_left")) {
            dl.load.force_left = parse_vec3(*e);
            any = true;
        }
        if (const Entry* e = sec.find("force_right")) {
            dl.load.force_right = parse_vec3(*e);
            any = true;
        }
        if (const Entry* e = sec.find("couple")) {
            dl.load.couple = parse_vec3(*e);
            any = true;
        }
        if (!any) fail(sec.line, "distributed load without components");
        doc.loads.distributed.push_back(dl);
    }
}

void read_solver(const Section& sec, ProblemDocument& doc) {
    check_keys(sec, {"steps", "residual_tolerance", "increment_tolerance", "load_scale",
                     "max_iterations", "max_bisection_depth", "condense", "integration"});
    for (const auto& e : sec.entries) {
        if (e.key == "steps") doc.steps = parse_int(e);
        else if (e.key == "residual_tolerance") doc.options.residual_tolerance = parse_double(e);
        else if (e.key == "increment_tolerance") doc.options.increment_tolerance = parse_double(e);
        else if (e.key == "load_scale") doc.options.load_scale = parse_double(e);
        else if (e.key == "max_iterations") doc.options.max_iterations = parse_int(e);
        else if (e.key == "max_bisection_depth") doc.options.max_bisection_depth = parse_int(e);
        else if (e.key == "condense") doc.options.condense = parse_bool(e);
        else doc.options.scheme = report::scheme_from_name(e.value);
    }
}

std::string format_full(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_vec3(const Vec3& v) {
    return "[" + format_full(v.x()) + ", " + format_full(v.y()) + ", " + format_full(v.z()) + "]";
}

}  // namespace

ProblemDocument parse_problem(const std::string& text) {
    ProblemDocument doc;
    bool seen_geometry = false, seen_section = false;
    for (const Section& sec : split_sections(text)) {
        if (sec.name == "geometry") {
            if (seen_geometry) fail(sec.line, "repeated geometry section");
            read_geometry(sec, doc);
            seen_geometry = true;
        } else if (sec.name == "cross_section") {
            if (seen_section) fail(sec.line, "repeated cross_section section");
            read_cross_section(sec, doc);
            seen_section = true;
        } else if (sec.name == "bc") {
            read_bc(sec, doc);
        } else if (sec.name == "load") {
            read_load(sec, doc);
        } else if (sec.name == "solver") {
            read_solver(sec, doc);
        } else {
            fail(sec.line, "unknown section " + sec.name);
        }
    }
    if (!seen_geometry) throw ParseError("problem needs a geometry section");
    if (!seen_section) throw ParseError("problem needs a cross_section section");
    return doc;
}

std::string write_problem(const ProblemDocument& doc) {
    std::ostringstream os;
    os << "[geometry]\n";
    os << "builder = " << doc.builder << "\n";
    if (doc.builder == "straight") {
        os << "length = " << format_full(doc.length) << "\n";
        os << "nelem = " << doc.nelem << "\n";
    } else if (doc.builder == "arc") {
        os << "radius = " << format_full(doc.radius) << "\n";
        os << "angle = " << format_full(doc.angle) << "\n";
        os << "plane = " << doc.plane << "\n";
        os << "nelem = " << doc.nelem << "\n";
    } else if (doc.builder == "helix") {
        os << "radius = " << format_full(doc.radius) << "\n";
        os << "height = " << format_full(doc.height) << "\n";
        os << "coils = " << format_full(doc.coils) << "\n";
        os << "nelem = " << doc.nelem << "\n";
    } else if (doc.builder == "polyline") {
        os << "points = [";
        for (std::size_t i = 0; i < doc.points.size(); ++i) {
            if (i) os << ", ";
            os << format_full(doc.points[i].x()) << ", " << format_full(doc.points[i].y()) << ", "
               << format_full(doc.points[i].z());
        }
        os << "]\n";
        os << "nelem = " << doc.nelem << "\n";
    } else {  // fork
        os << "shaft_length = " << format_full(doc.shaft_length) << "\n";
        os << "radius = " << format_full(doc.radius) << "\n";
        os << "n_shaft = " << doc.n_shaft << "\n";
        os << "n_tine = " << doc.n_tine << "\n";
    }
    os << "order = " << doc.order << "\n";

    os << "\n[cross_section]\n";
    os << "EA = " << format_full(doc.section.EA) << "\n";
    os << "GA2 = " << format_full(doc.section.GA2) << "\n";
    os << "GA3 = " << format_full(doc.section.GA3) << "\n";
    os << "GIt = " << format_full(doc.section.GIt) << "\n";
    os << "EI2 = " << format_full(doc.section.EI2) << "\n";
    os << "EI3 = " << format_full(doc.section.EI3) << "\n";

    for (const auto& bc : doc.bcs) {
        os << "\n[bc]\n";
        os << "node = " << bc.node << "\n";
        os << "kind = " << (bc.kind == Constraint::kPosition ? "position" : "rotation") << "\n";
        os << "base = " << format_vec3(bc.base) << "\n";
        os << "target = " << format_vec3(bc.target) << "\n";
    }
    for (const auto& f : doc.loads.forces) {
        os << "\n[load]\n";
        os << "node = " << f.node << "\n";
        os << "force = " << format_vec3(f.force) << "\n";
    }
    for (const auto& m : doc.loads.moments) {
        os << "\n[load]\n";
        os << "node = " << m.node << "\n";
        os << "moment = " << format_vec3(m.moment) << "\n";
        os << "frame = " << (m.frame == MomentFrame::kSpatial ? "spatial" : "material") << "\n";
    }
    for (const auto& d : doc.loads.distributed) {
        os << "\n[load]\n";
        os << "element = " << d.element << "\n";
        os << "force_left = " << format_vec3(d.load.force_left) << "\n";
        os << "force_right = " << format_vec3(d.load.force_right) << "\n";
        os << "couple = " << format_vec3(d.load.couple) << "\n";
    }

    os << "\n[solver]\n";
    os << "steps = " << doc.steps << "\n";
    os << "residual_tolerance = " << format_full(doc.options.residual_tolerance) << "\n";
    os << "increment_tolerance = " << format_full(doc.options.increment_tolerance) << "\n";
    os << "load_scale = " << format_full(doc.options.load_scale) << "\n";
    os << "max_iterations = " << doc.options.max_iterations << "\n";
    os << "max_bisection_depth = " << doc.options.max_bisection_depth << "\n";
    os << "condense = " << (doc.options.condense ? "true" : "false") << "\n";
    os << "integration = " << report::scheme_name(doc.options.scheme) << "\n";
    return os.str();
}

Mesh build_mesh(const ProblemDocument& doc) {
    if (doc.builder == "straight")
        return build_straight(doc.length, doc.nelem, doc.order, doc.section);
    if (doc.builder == "arc") {
        ArcPlane plane;
        if (doc.plane == "xy") plane = ArcPlane::kXY;
        else if (doc.plane == "xz") plane = ArcPlane::kXZ;
        else if (doc.plane == "yz") plane = ArcPlane::kYZ;
        else throw ParseError("unknown arc plane: " + doc.plane);
        return build_arc(doc.radius, doc.angle, plane, doc.nelem, doc.order, doc.section);
    }
    if (doc.builder == "helix")
        return build_helix(doc.radius, doc.height, doc.coils, doc.nelem, doc.order, doc.section);
    if (doc.builder == "polyline")
        return build_polyline(doc.points, doc.nelem, doc.order, doc.section);
    if (doc.builder == "fork")
        return build_fork(doc.shaft_length, doc.radius, doc.n_shaft, doc.n_tine, doc.order,
                          doc.section);
    throw ParseError("unknown builder: " + doc.builder);
}

std::vector<SweepCase> parse_sweep(const std::string& text) {
    std::vector<SweepCase> cases;
    for (const Section& sec : split_sections(text)) {
        if (sec.name != "case") fail(sec.line, "sweep files contain only case sections");
        check_keys(sec, {"benchmark", "k", "nelem", "rho", "integration"});
        SweepCase c;
        for (const auto& e : sec.entries) {
            if (e.key == "benchmark") c.benchmark = e.value;
            else if (e.key == "k") c.params.k = parse_int(e);
            else if (e.key == "nelem") c.params.nelem = parse_int(e);
            else if (e.key == "rho") c.params.rho = parse_double(e);
            else c.params.scheme = report::scheme_from_name(e.value);
        }
        if (c.benchmark.empty()) fail(sec.line, "case needs a benchmark name");
        cases.push_back(std::move(c));
    }
    if (cases.empty()) throw ParseError("sweep file has no cases");
    return cases;
}

}  // namespace beamfe::io
