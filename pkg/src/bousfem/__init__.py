"""Galerkin spline solver for Boussinesq long-wave systems over variable bathymetry."""

from .analysis import (
    GaugeSeries,
    convergence_rates,
    count_crests,
    crest_metrics,
    error_norms,
    greens_law,
    reflected_wave_metrics,
    runup_max,
)
from .bathymetry import Bathymetry, make_profile, profile_kinds
from .config import ConfigError, parse_config, render_config
from .experiments import (
    ExperimentConfig,
    ScalingLayer,
    build_experiment,
    compare_reference,
    run_experiment,
)
from .models import KINDS, ModelParams, State, build_system
from .solitary import kdv_initial_data, solve_profile
from .splines import SplineSpace
from .timestep import RunConfig, RunRecord, integrate

__version__ = "0.1.0"

__all__ = [
    "Bathymetry",
    "ConfigError",
    "ExperimentConfig",
    "GaugeSeries",
    "KINDS",
    "ModelParams",
    "RunConfig",
    "RunRecord",
    "ScalingLayer",
    "SplineSpace",
    "State",
    "build_experiment",
    "build_system",
    "compare_reference",
    "convergence_rates",
    "count_crests",
    "crest_metrics",
    "error_norms",
    "greens_law",
    "integrate",
    "kdv_initial_data",
    "make_profile",
    "parse_config",
    "profile_kinds",
    "reflected_wave_metrics",
    "render_config",
    "run_experiment",
    "runup_max",
    "solve_profile",
]
