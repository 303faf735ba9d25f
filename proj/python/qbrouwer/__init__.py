"""Approximate fixed points of eps-continuous self-maps of the unit ball."""

from ._core import (
    TOL_GEOM,
    Error,
    ExtremalMap,
    StepMap1D,
    diameter,
    jung_nearest,
    jung_radius,
    jung_random_test,
    min_enclosing_ball,
    regular_simplex_vertices,
    run_pipeline,
    tightness_report,
)

__all__ = [
    "TOL_GEOM",
    "Error",
    "ExtremalMap",
    "StepMap1D",
    "diameter",
    "jung_nearest",
    "jung_radius",
    "jung_random_test",
    "min_enclosing_ball",
    "regular_simplex_vertices",
    "run_pipeline",
    "tightness_report",
]
