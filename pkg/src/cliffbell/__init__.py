"""Cl(3,0) geometric algebra and EPR-Bohm correlation laboratory."""

from .ga_core import (
    DEFAULT_TABLE,
    E1,
    E2,
    E3,
    E12,
    E13,
    E23,
    I,
    Multivector,
    NormalizationError,
    Orientation,
    UnitVector3,
    commutator,
    geometric_product,
    grade_part,
    inner_product,
    mu_dot_n,
    outer_product,
)
from .kernels import BACKEND

__version__ = "0.1.0"
