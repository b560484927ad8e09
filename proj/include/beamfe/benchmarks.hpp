#pragma once

#include <map>
#include <string>
#include <vector>

#include "beamfe/solver.hpp"

namespace beamfe::bench {

struct SolveStats {
    int newton_iterations = 0;
    int steps = 0;
};

/// Full outcome of one solved configuration, kept rich enough for error
/// metrics, reporting, and cross-checks against reference meshes.
struct RunOutput {
    Mesh mesh;
    DofLayout layout;
    Eigen::VectorXd state;
    SolveStats stats;
    int monitor_node = -1;
    Vec3 monitor_displacement = Vec3::Zero();
    double error = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, std::vector<double>> series;

    Vec3 node_position(int node) const { return state.segment<3>(layout.node_position(node)); }
};

/// Pure-moment roll-up of a straight cantilever into two full circles.
/// The error is the relative L2 distance to the analytic circle.
RunOutput run_rollup(int k, int nelem, double rho, IntegrationScheme scheme);

/// Quarter-circle cantilever bent out of plane by a follower tip moment,
/// then spun rigidly ten turns through the clamp rotation. The series
/// "u3" and "phi" record the tip height and the invariant stress measure
/// after each spin increment (first entry: before the spin).
RunOutput run_objectivity(int k, int nelem, double rho);

/// 45-degree circular cantilever under an out-of-plane dead tip force,
/// with the load scaled so every slenderness deforms alike.
RunOutput run_arc45(int k, int nelem, double rho);

/// Straight beam wound onto an exact helix by a matched end rotation and
/// material tip moment. The error is measured against the analytic helix.
RunOutput run_helix(int k, int nelem);

/// Straight beam coiled into ten overlapping turns by a spatial tip moment
/// plus an axial dead force.
RunOutput run_helical(int k, int nelem);

/// Out-of-plane staircase polyline loaded by a diagonal dead tip force.
/// nelem counts all elements and must be divisible by the three segments.
RunOutput run_slope(int k, int nelem);

/// Two-tine fork: a dead force at the upper tip, then an opposite one at
/// the lower tip (order swapped when swap_order is set). The series
/// "u_p1_phase1" stores the upper-tip displacement after the first phase.
RunOutput run_fork(int k, int nelem, bool swap_order);

/// Benchmark-specific default parameters (0 / NaN = meaningful default is
/// chosen per case list).
struct CaseParams {
    int k = 0;         // 0 = benchmark default
    int nelem = 0;     // 0 = benchmark default (rollup: refinement ladder)
    double rho = 0.0;  // 0 = benchmark default (arc45: all tabulated values)
    IntegrationScheme scheme = IntegrationScheme::kReduced;
    bool timings = false;
};

/// One line of benchmark output (the CSV row plus report extras).
struct CaseRow {
    std::string benchmark;
    int k = 0;
    int nelem = 0;
    double rho = std::numeric_limits<double>::quiet_NaN();
    IntegrationScheme scheme = IntegrationScheme::kReduced;
    double e_l2 = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    Vec3 u = Vec3::Zero();
    int newton_total_iters = 0;
    double wall_ms = 0.0;
    std::vector<Vec3> centerline;
    std::map<std::string, std::vector<double>> series;
    int oracle = -1;  // -1 no embedded reference applies, 0 mismatch, 1 match
};

/// Stamps pass/fail on every row whose configuration matches one of the
/// embedded reference solutions; rows without a reference keep oracle = -1.
void apply_oracles(std::vector<CaseRow>& rows);

const std::vector<std::string>& benchmark_names();

/// Runs a named benchmark. Unset parameters take the benchmark's defaults,
/// which may expand to several rows (rollup: a refinement ladder; arc45:
/// all slendernesses; helix: both tabulated orders). Throws Error for
/// unknown names or invalid parameters.
std::vector<CaseRow> benchmark_rows(const std::string& name, const CaseParams& params);

/// Deformed centerline sampled at `per_element` points per element.
std::vector<Vec3> sample_centerline(const Mesh& mesh, const DofLayout& layout,
                                    const Eigen::VectorXd& state, int per_element = 20);

}  // namespace beamfe::bench
