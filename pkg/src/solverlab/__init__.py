"""1D finite-volume solver laboratory.

Schemes that track discontinuities inside cells (exact on pure shocks)
next to classical baselines, exact Riemann solvers for isothermal and
ideal-gas Euler, a benchmark case registry, and error/order tooling.
"""
from .baselines import (SCHEMES, SchemeInfo, godunov_step, lxf_step,
                        minmod, muscl_step, nt_step, rusanov_step)
from .cases import CASES, CaseSpec, get_case, momentum_plateaus
from .errors import (PositivityError, RiemannError, SolverError,
                     StaticFieldError, UsageError, VacuumError)
from .full_euler import full_step
from .grid import (BoundaryCondition, GridSpec, MeshMotion, PiecewiseProfile,
                   SimClock, average_profile, fill_ghosts, init_cell_averages,
                   mesh_speed_for_step, remap_to_reference, stable_dt)
from .harness import (RunResult, SolverRun, build_model, convergence_order,
                      entropy_budget, exact_pure_shock_average, l1_error,
                      level_crossing, order_study, overshoot_metric,
                      reference_fine_grid, restrict_field, run_case,
                      transition_width)
from .isothermal import iso_step
from .models import (BURGERS, BurgersModel, ConvexFlux, IdealGasModel,
                     IsothermalModel)
from .riemann import (GasState, GasStar, IsoState, IsoStar, gas_star,
                      iso_shock_speed, iso_star, rh_residual, sample_gas,
                      sample_iso)
from .scalar import exact_compression, reconstruct_scalar, scalar_step

__version__ = "0.1.0"

__all__ = [
    "BURGERS", "BoundaryCondition", "BurgersModel", "CASES", "CaseSpec",
    "ConvexFlux", "GasStar", "GasState", "GridSpec", "IdealGasModel",
    "IsoStar", "IsoState", "IsothermalModel", "MeshMotion",
    "PiecewiseProfile", "PositivityError", "RiemannError", "RunResult",
    "SCHEMES", "SchemeInfo", "SimClock", "SolverError", "SolverRun",
    "StaticFieldError", "UsageError", "VacuumError", "average_profile",
    "build_model", "convergence_order", "entropy_budget",
    "exact_compression", "exact_pure_shock_average", "fill_ghosts",
    "full_step", "gas_star", "get_case", "godunov_step",
    "init_cell_averages", "iso_shock_speed", "iso_star", "iso_step",
    "l1_error", "level_crossing", "lxf_step", "mesh_speed_for_step",
    "minmod", "momentum_plateaus", "muscl_step", "nt_step", "order_study",
    "overshoot_metric", "reconstruct_scalar", "reference_fine_grid",
    "remap_to_reference", "restrict_field", "rh_residual", "run_case",
    "rusanov_step", "sample_gas", "sample_iso", "scalar_step", "stable_dt",
    "transition_width",
]
