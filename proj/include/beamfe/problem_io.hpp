#pragma once

#include <string>
#include <vector>

#include "beamfe/benchmarks.hpp"
#include "beamfe/solver.hpp"

namespace beamfe::io {

/// A complete single-phase problem: geometry recipe, section, constraints,
/// loads, and solver settings, read from a sectioned key = value document.
struct ProblemDocument {
    // [geometry]
    std::string builder = "straight";  // straight | arc | helix | polyline | fork
    double length = 0.0;               // straight
    double radius = 0.0;               // arc, helix, fork tines
    double angle = 0.0;                // arc, radians
    std::string plane = "xy";          // arc: xy | xz | yz
    double height = 0.0;               // helix rise
    double coils = 0.0;                // helix turns
    double shaft_length = 0.0;         // fork
    std::vector<Vec3> points;          // polyline vertices
    int nelem = 0;                     // elements (per segment for polyline)
    int n_shaft = 0, n_tine = 0;       // fork limbs
    int order = 1;

    // [cross_section]
    CrossSection section;

    // [bc] (repeatable)
    std::vector<BoundaryCondition> bcs;

    // [load] (repeatable)
    LoadCase loads;

    // [solver]
    int steps = 10;
    SolverOptions options;
};

/// Parses a problem document. Unknown sections or keys, malformed values,
/// and structurally invalid entries all raise ParseError.
ProblemDocument parse_problem(const std::string& text);

/// Canonical text form; parse_problem(write_problem(doc)) reproduces doc.
std::string write_problem(const ProblemDocument& doc);

/// Builds the mesh the document describes.
Mesh build_mesh(const ProblemDocument& doc);

/// One requested configuration in a sweep specification.
struct SweepCase {
    std::string benchmark;
    bench::CaseParams params;
};

/// Parses a sweep specification: repeated [case] sections with keys
/// benchmark, k, nelem, rho, integration.
std::vector<SweepCase> parse_sweep(const std::string& text);

}  // namespace beamfe::io
