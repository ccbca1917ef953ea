"""Numerical and exact-algebra checks for gradient Ricci solitons and their relatives."""

from .errors import SolitonKitError
from .geom import AlmostComplexField, Frame, GradientField, MetricField, ScalarField, VectorField
from .gallery import build, build_from_config, catalog_ids
from .checks import run_check, run_scenario

__all__ = [
    "SolitonKitError",
    "AlmostComplexField",
    "Frame",
    "GradientField",
    "MetricField",
    "ScalarField",
    "VectorField",
    "build",
    "build_from_config",
    "catalog_ids",
    "run_check",
    "run_scenario",
]

__version__ = "0.1.0"
