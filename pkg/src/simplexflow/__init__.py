"""n-simplex volume consensus gradient flows.

Particles in R^d descend the sum of squared n-simplex volumes over their
tuples, collapsing onto an (n-1)-dimensional affine subspace; a sparse
simplex topology gives the same terminal behavior at a fraction of the
cost. The package bundles the geometry kernels, the full and reduced
flows, theorem-verification diagnostics, a CLI, and a scikit-learn style
transformer wrapping the whole pipeline.
"""

from .diagnostics import DiagnosticsReport, center_of_mass, check_trajectory, is_equilibrium, mean_simplex_volume
from .dynamics import IntegratorConfig, Trajectory, explicit_linear_solution, simulate, step
from .estimator import SimplexConsensusFlow
from .geometry import AffineChart, affine_chart, affine_rank, heron_area_squared, project, squared_distance, volume_squared
from .potential import ModelParams, gradient_check, grad_vol_squared, potential_full, potential_reduced, rhs_full, rhs_reduced
from .simplex_set import SimplexSet, base_point_set, full_set, load_topology, save_topology, symmetric_closure, validate

__version__ = "0.1.0"

__all__ = [
    "AffineChart",
    "DiagnosticsReport",
    "IntegratorConfig",
    "ModelParams",
    "SimplexConsensusFlow",
    "SimplexSet",
    "Trajectory",
    "affine_chart",
    "affine_rank",
    "base_point_set",
    "center_of_mass",
    "check_trajectory",
    "explicit_linear_solution",
    "full_set",
    "grad_vol_squared",
    "gradient_check",
    "heron_area_squared",
    "is_equilibrium",
    "load_topology",
    "mean_simplex_volume",
    "potential_full",
    "potential_reduced",
    "project",
    "rhs_full",
    "rhs_reduced",
    "save_topology",
    "simulate",
    "squared_distance",
    "step",
    "symmetric_closure",
    "validate",
    "volume_squared",
]
