#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/SparseCore>

#include "beamfe/mesh.hpp"

namespace beamfe {

/// Dead point force at a node, constant in the spatial frame.
struct PointForce {
    int node = -1;
    Vec3 force = Vec3::Zero();
};

enum class MomentFrame { kSpatial, kMaterial };

/// Point moment at a node. A spatial moment keeps a fixed direction; a
/// material moment follows the node frame exp(psi_v) * Lambda0 of the node's
/// anchor element, i.e. it is a follower load.
struct PointMoment {
    int node = -1;
    Vec3 moment = Vec3::Zero();
    MomentFrame frame = MomentFrame::kSpatial;
};

/// Distributed load on one element (see ElementLoad).
struct DistributedLoad {
    int element = -1;
    ElementLoad load;
};

struct LoadCase {
    std::vector<PointForce> forces;
    std::vector<PointMoment> moments;
    std::vector<DistributedLoad> distributed;

    bool empty() const { return forces.empty() && moments.empty() && distributed.empty(); }
};

enum class Constraint { kPosition, kRotation };

/// Prescribes a node's position or vertex rotation vector. The imposed
/// value ramps linearly with the load factor: base + lambda * (target - base).
struct BoundaryCondition {
    int node = -1;
    Constraint kind = Constraint::kPosition;
    Vec3 base = Vec3::Zero();
    Vec3 target = Vec3::Zero();

    Vec3 value(double lambda) const { return base + lambda * (target - base); }
};

/// One leg of a loading program. `ramped` scales with the leg's load factor
/// from 0 to 1 over `steps` increments; `held` stays at full strength
/// throughout (use it to keep the loads of earlier legs applied).
struct Phase {
    LoadCase ramped;
    LoadCase held;
    std::vector<BoundaryCondition> bcs;
    int steps = 10;
};

struct SolverOptions {
    double residual_tolerance = 1e-10;   // scaled by max(1, load_scale)
    double increment_tolerance = 1e-10;  // scaled by max(1, |x|)
    double load_scale = 1.0;
    int max_iterations = 50;
    int max_bisection_depth = 8;
    bool condense = true;
    IntegrationScheme scheme = IntegrationScheme::kReduced;
};

struct StepReport {
    double lambda = 0.0;
    int iterations = 0;
    double residual_norm = 0.0;
    double increment_norm = 0.0;
};

struct RunReport {
    int total_steps = 0;
    int total_iterations = 0;
    std::vector<StepReport> steps;
};

/// Called after every accepted load increment with the phase index, the
/// step's report, and the converged state.
using StepObserver = std::function<void(int phase, const StepReport&, const Eigen::VectorXd&)>;

/// Residual of the discrete energy over all dofs, external loads included
/// (`ramped` scaled by lambda, `held` at full strength). No boundary
/// conditions are applied here.
Eigen::VectorXd assemble_residual(const Mesh& mesh, const DofLayout& layout,
                                  const Eigen::VectorXd& x, double lambda,
                                  const LoadCase& ramped, const LoadCase& held = {},
                                  IntegrationScheme scheme = IntegrationScheme::kReduced);

/// Derivative of assemble_residual with respect to the state. Unsymmetric
/// when point moments or distributed couples are active.
Eigen::SparseMatrix<double> assemble_tangent(const Mesh& mesh, const DofLayout& layout,
                                             const Eigen::VectorXd& x, double lambda,
                                             const LoadCase& ramped, const LoadCase& held = {},
                                             IntegrationScheme scheme = IntegrationScheme::kReduced);

/// Internal energy minus the work of dead forces. Point moments and
/// distributed couples have no potential and are not included, so this is
/// the function whose gradient assemble_residual returns only for load
/// cases without them.
double total_potential(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& x,
                       double lambda, const LoadCase& ramped, const LoadCase& held = {},
                       IntegrationScheme scheme = IntegrationScheme::kReduced);

/// One Newton solve at a fixed load factor. Prescribed dofs are set to
/// their boundary-condition values up front and eliminated from the
/// system; with opts.condense each element's internal moment/rotation
/// block is reduced away before the sparse solve and recovered after it,
/// which reproduces the plain Newton iterates exactly. Convergence is
/// measured on the full residual over all free dofs. Throws NonConvergence
/// when the iteration budget is exhausted (or an iterate leaves the
/// admissible rotation chart) and SingularTangent when the factorization
/// fails.
StepReport solve_step(const Mesh& mesh, const DofLayout& layout, Eigen::VectorXd& x,
                      double lambda, const LoadCase& ramped, const LoadCase& held,
                      const std::vector<BoundaryCondition>& bcs, const SolverOptions& opts);

/// Runs the phases in order, stepping each load factor from 0 to 1 in
/// phase.steps increments. A failed increment is retried with half the
/// increment (up to opts.max_bisection_depth consecutive halvings); after a
/// rescued step the increment grows back toward the nominal one. After
/// every accepted step, free rotation-vector dofs longer than pi are pulled
/// back onto the ball of radius pi (same rotation, shorter vector), so
/// multi-turn paths stay inside the chart; prescribed vertex rotations are
/// never rewritten.
RunReport run_continuation(const Mesh& mesh, const DofLayout& layout, Eigen::VectorXd& x,
                           const std::vector<Phase>& phases, const SolverOptions& opts,
                           const StepObserver& observer = {});

/// Relative L2 distance between the deformed centerline and a reference
/// curve given as a function of arc length along the undeformed mesh:
///   sqrt( (1/L) * integral |r(s) - ref(s)|^2 ds ) / normalization.
/// Elements are assumed to run along the curve in index order.
double error_l2_position(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& x,
                         const std::function<Vec3(double)>& reference_position,
                         double normalization);

/// Least-squares slope of log(error) against log(h). Entries with error
/// below `floor` (roundoff-dominated) are dropped; with fewer than two
/// usable points the rate is reported as +infinity.
double convergence_rate(const std::vector<double>& h, const std::vector<double>& errors,
                        double floor = 100.0 * std::numeric_limits<double>::epsilon());

/// Integral of M . C_kappa^-1 . M over the mesh (twice the complementary
/// bending/torsion energy), a rotation-invariant measure of the stress
/// state.
double complementary_curvature_energy(const Mesh& mesh, const DofLayout& layout,
                                      const Eigen::VectorXd& x);

}  // namespace beamfe
