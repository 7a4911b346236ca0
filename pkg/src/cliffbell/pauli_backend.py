"""Pauli-matrix oracle: the singlet state, exact quantum expectations, and the
matrix representation of Cl(3,0) used to cross-check the product table.

Matrices are plain complex128 numpy arrays (2x2 or 4x4).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ga_core import (
    ATOL,
    Multivector,
    UnitLike,
    UnitVector3,
    as_unit_vector,
    cross,
)

__all__ = [
    "IDENTITY2",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "PAULI",
    "CheckReport",
    "sigma_dot",
    "spin_eigenstate",
    "singlet_state",
    "singlet_expectation_single",
    "singlet_expectation_joint",
    "verify_pauli_algebra",
    "verify_pauli_identity",
    "represent",
    "unrepresent",
]

IDENTITY2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (IDENTITY2, *PAULI):
    _m.flags.writeable = False

_E_Z = UnitVector3(0.0, 0.0, 1.0)


@dataclass
class CheckReport:
    """Outcome of one verification check."""

    name: str
    max_deviation: float
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            **({"details": self.details} if self.details else {}),
        }


def sigma_dot(n: UnitLike) -> np.ndarray:
    """``n_x sigma_x + n_y sigma_y + n_z sigma_z``."""
    n = as_unit_vector(n)
    return n.x * SIGMA_X + n.y * SIGMA_Y + n.z * SIGMA_Z


def spin_eigenstate(n: UnitLike, sign: int) -> np.ndarray:
    """Unit eigenvector of ``sigma_dot(n)`` with eigenvalue ``sign``.

    Built from the projector ``(1 + sign sigma.n) / 2``; the phase makes the
    first nonzero component real and positive.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    proj = 0.5 * (IDENTITY2 + sign * sigma_dot(n))
    col = proj[:, int(np.argmax(np.linalg.norm(proj, axis=0)))]
    v = col / np.linalg.norm(col)
    lead = v[0] if abs(v[0]) > ATOL else v[1]
    return v * (abs(lead) / lead)


def singlet_state(reference: UnitLike = _E_Z) -> np.ndarray:
    """``(|n+>|n-> - |n->|n+>) / sqrt(2)`` in the computational basis."""
    up = spin_eigenstate(reference, 1)
    down = spin_eigenstate(reference, -1)
    return (np.kron(up, down) - np.kron(down, up)) / np.sqrt(2.0)


def _expect(state: np.ndarray, op: np.ndarray) -> float:
    # dividing by <psi|psi> cancels the rounding in the 1/sqrt(2) amplitudes
    val = np.vdot(state, op @ state) / np.vdot(state, state).real
    return float(val.real)


def singlet_expectation_single(n: UnitLike, party: str = "A", reference: UnitLike = _E_Z) -> float:
    """``<psi| sigma.n (x) 1 |psi>`` for party A, ``<psi| 1 (x) sigma.n |psi>`` for B."""
    s = sigma_dot(n)
    if party == "A":
        op = np.kron(s, IDENTITY2)
    elif party == "B":
        op = np.kron(IDENTITY2, s)
    else:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    return _expect(singlet_state(reference), op)


def singlet_expectation_joint(a: UnitLike, b: UnitLike, reference: UnitLike = _E_Z) -> float:
    """``<psi| sigma.a (x) sigma.b |psi>`` by explicit 4x4 contraction."""
    return _expect(singlet_state(reference), np.kron(sigma_dot(a), sigma_dot(b)))


def _levi_civita(j: int, k: int, l: int) -> int:
    return int((j - k) * (k - l) * (l - j) / 2)


def verify_pauli_algebra() -> CheckReport:
    """``sigma_j sigma_k = delta_jk 1 + i eps_jkl sigma_l`` for all nine pairs."""
    worst = 0.0
    per_pair = {}
    for j in range(3):
        for k in range(3):
            expected = (1.0 if j == k else 0.0) * IDENTITY2
            for l in range(3):
                expected = expected + 1j * _levi_civita(j, k, l) * PAULI[l]
            dev = float(np.max(np.abs(PAULI[j] @ PAULI[k] - expected)))
            per_pair["xyz"[j] + "xyz"[k]] = dev
            worst = max(worst, dev)
    return CheckReport("pauli_algebra", worst, 1e-15, {"per_pair": per_pair})


def verify_pauli_identity(a: UnitLike, b: UnitLike) -> CheckReport:
    """``(i sigma.a)(i sigma.b) = -a.b 1 - i sigma.(a x b)``, entrywise."""
    a = as_unit_vector(a)
    b = as_unit_vector(b)
    lhs = (1j * sigma_dot(a)) @ (1j * sigma_dot(b))
    c = cross(a, b)
    rhs = -a.dot(b) * IDENTITY2 - 1j * (c[0] * SIGMA_X + c[1] * SIGMA_Y + c[2] * SIGMA_Z)
    return CheckReport("pauli_identity", float(np.max(np.abs(lhs - rhs))), ATOL)


# images of the eight blades: 1, s_x, s_y, s_z, s_x s_y, s_x s_z, s_y s_z, s_x s_y s_z
_BLADE_MATRICES = np.stack(
    [
        IDENTITY2,
        SIGMA_X,
        SIGMA_Y,
        SIGMA_Z,
        SIGMA_X @ SIGMA_Y,
        SIGMA_X @ SIGMA_Z,
        SIGMA_Y @ SIGMA_Z,
        SIGMA_X @ SIGMA_Y @ SIGMA_Z,
    ]
)
_BLADE_MATRICES.flags.writeable = False


def represent(m: Multivector) -> np.ndarray:
    """Algebra homomorphism Cl(3,0) -> 2x2 complex matrices, ``e_j -> sigma_j``."""
    return np.tensordot(m.coefficients, _BLADE_MATRICES, axes=1)


def unrepresent(M: np.ndarray) -> Multivector:
    """Inverse of :func:`represent`.

    Writes ``M = (a0 + i b0) 1 + sum_j (a_j + i b_j) sigma_j``; the real parts
    fill the scalar and vector slots, the imaginary parts the pseudoscalar and
    the bivectors dual to each sigma_j (``i sigma_x = e23``, ``i sigma_y = -e13``,
    ``i sigma_z = e12``).
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    s0 = np.trace(M) / 2
    sx, sy, sz = (np.trace(p @ M) / 2 for p in PAULI)
    return Multivector(
        [s0.real, sx.real, sy.real, sz.real, sz.imag, -sy.imag, sx.imag, s0.imag]
    )
