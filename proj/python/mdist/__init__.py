"""Matching distance between bifiltered complexes.

Diagrams are lists of ``(birth, death)`` pairs, ``death = inf`` marking an
essential class. Estimates come back as dictionaries with the value, the
realizing line ``(a, b)`` and the number of lines evaluated.
"""

from ._core import (
    Complex,
    EstimatorConfig,
    MdistError,
    ParetoGrid,
    bottleneck,
    line_cost,
    load_mesh,
    naive_estimate,
    point_distance,
    reduced_estimate,
    sphere,
    sphere_grid,
    sup_norm_difference,
    torus,
    torus_grid,
    verify,
)

__all__ = [
    "Complex",
    "EstimatorConfig",
    "MdistError",
    "ParetoGrid",
    "bottleneck",
    "line_cost",
    "load_mesh",
    "naive_estimate",
    "point_distance",
    "reduced_estimate",
    "sphere",
    "sphere_grid",
    "sup_norm_difference",
    "torus",
    "torus_grid",
    "verify",
]
