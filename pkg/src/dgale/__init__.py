"""Moving-mesh DG solver for compressible two-component flows."""

from .config import ConfigError, RunConfig, load_config
from .driver import (NumericalFailure, RunArtifacts, compare_modes,
                     convergence_study, error_norms, evolve, run)
from .eos import MixtureEOS, PositivityError
from .integrator import StepRejected, advance_one_step, compute_dt, rk3_step
from .kinetic_flux import (EdgeTrace, kinetic_moments, nok_edge_flux,
                           riemann_edge_velocity, species_flux)
from .limiter import LimiterConfig, detect_troubled, limit
from .mesh import Mesh1D, Mesh2D, MeshError, build_interval_mesh, build_rect_mesh
from .mesh_motion import (MotionParams, equidistribution_ratio, mesh_energy,
                          mmpde_correct, predict_correct, solution_metric)
from .problems import PROBLEMS, Problem, get_problem, project_initial
from .residual import Discretization, residual
from .riemann import RiemannState, solution_at, star_state

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "RunConfig", "load_config",
    "NumericalFailure", "RunArtifacts", "compare_modes", "convergence_study",
    "error_norms", "evolve", "run",
    "MixtureEOS", "PositivityError",
    "StepRejected", "advance_one_step", "compute_dt", "rk3_step",
    "EdgeTrace", "kinetic_moments", "nok_edge_flux", "riemann_edge_velocity",
    "species_flux",
    "LimiterConfig", "detect_troubled", "limit",
    "Mesh1D", "Mesh2D", "MeshError", "build_interval_mesh", "build_rect_mesh",
    "MotionParams", "equidistribution_ratio", "mesh_energy", "mmpde_correct",
    "predict_correct", "solution_metric",
    "PROBLEMS", "Problem", "get_problem", "project_initial",
    "Discretization", "residual",
    "RiemannState", "solution_at", "star_state",
    "__version__",
]
