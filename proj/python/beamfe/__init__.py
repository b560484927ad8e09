"""Mixed finite elements for geometrically exact rods.

The compiled core exposes the rotation algebra, strain measures, mesh
builders, a problem-document solver, and the benchmark drivers.  See
``benchmark_names()`` for the available benchmarks and the command-line
tool ``beam`` for the same functionality as a standalone executable.
"""

from ._core import (
    BeamError,
    CrossSection,
    Mesh,
    NonConvergence,
    ParseError,
    __version__,
    benchmark_names,
    build_arc,
    build_fork,
    build_helix,
    build_polyline,
    build_straight,
    curvature_local,
    dual_energy_kappa,
    energy_gamma,
    exp_rotvec,
    force_strain,
    gauss_rule,
    log_rotation,
    relative_rotvec,
    run_benchmark,
    skew,
    solve_problem,
    tangent_map,
)

__all__ = [
    "BeamError",
    "CrossSection",
    "Mesh",
    "NonConvergence",
    "ParseError",
    "__version__",
    "benchmark_names",
    "build_arc",
    "build_fork",
    "build_helix",
    "build_polyline",
    "build_straight",
    "curvature_local",
    "dual_energy_kappa",
    "energy_gamma",
    "exp_rotvec",
    "force_strain",
    "gauss_rule",
    "log_rotation",
    "relative_rotvec",
    "run_benchmark",
    "skew",
    "solve_problem",
    "tangent_map",
]
