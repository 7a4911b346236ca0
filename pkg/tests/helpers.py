"""Shared hypothesis strategies and oracles."""

import numpy as np
from hypothesis import strategies as st

from cliffbell.ga_core import Multivector, UnitVector3
from cliffbell.pauli_backend import represent, unrepresent

coef = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
multivectors = st.lists(coef, min_size=8, max_size=8).map(Multivector)
vectors3 = st.tuples(coef, coef, coef).filter(lambda v: sum(c * c for c in v) > 1e-6)
unit_vectors = vectors3.map(lambda v: UnitVector3.normalized(*v))
orientations = st.sampled_from([1, -1])


def matrix_product_oracle(x: Multivector, y: Multivector) -> Multivector:
    """Geometric product computed through the Pauli representation."""
    return unrepresent(represent(x) @ represent(y))
