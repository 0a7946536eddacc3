"""Analytic fields, their jets, and geodesics."""

from .definition import (
    BoxSampler,
    FieldSpec,
    bundled_field,
    bundled_fields,
    field_from_dict,
    finite_difference_jet,
    jet_at,
    load_field,
    parse_field,
    validate_field,
)
from .expr import compile_expr, parse_expr, to_text
from .geodesic import GeodesicTrajectory, drift_order, integrate_geodesic

__all__ = [
    "BoxSampler",
    "FieldSpec",
    "GeodesicTrajectory",
    "bundled_field",
    "bundled_fields",
    "compile_expr",
    "drift_order",
    "field_from_dict",
    "finite_difference_jet",
    "integrate_geodesic",
    "jet_at",
    "load_field",
    "parse_expr",
    "parse_field",
    "to_text",
    "validate_field",
]
