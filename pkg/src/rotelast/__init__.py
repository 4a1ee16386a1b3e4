"""Nonlinear rotational elasticity on fields of rotation matrices."""

from .energy import ElasticModuli, Functional
from .grid import Boundary, Field, GridSpec
from .material import MaterialClass, derived_properties

__all__ = [
    "Boundary",
    "ElasticModuli",
    "Field",
    "Functional",
    "GridSpec",
    "MaterialClass",
    "derived_properties",
]
__version__ = "0.1.0"
