"""Tight spans of finite metric spaces, the circle, spheres and sup-norm sets."""

__version__ = "0.1.0"

from .errors import ConvergenceError, PreconditionError, SchemaError
from .metric_core import (
    CirclePoint,
    FiniteMetricSpace,
    antipode_map,
    circle_dist,
    cycle_graph,
    diameter,
    four_point_delta,
    hausdorff_circle,
    linf_dist,
    radius,
    sphere_dist,
)
from .tight_span_finite import (
    circular_vertex,
    circular_vertex_family,
    extend_via_mr,
    in_delta,
    is_minimal,
    kuratowski,
    midpoint_minimality_probe,
    project_to_span,
)

__all__ = [
    "CirclePoint", "ConvergenceError", "FiniteMetricSpace", "PreconditionError", "SchemaError",
    "antipode_map", "circle_dist", "circular_vertex", "circular_vertex_family", "cycle_graph",
    "diameter", "extend_via_mr", "four_point_delta", "hausdorff_circle", "in_delta",
    "is_minimal", "kuratowski", "linf_dist", "midpoint_minimality_probe", "project_to_span",
    "radius", "sphere_dist",
]
