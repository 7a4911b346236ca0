"""Verification suites run by ``cliffbell verify``.

Gating checks decide the exit code. Findings are measured and reported but do
not gate: they record where the orientation-averaging argument and the actual
Cl(3,0) algebra part ways.
"""

from __future__ import annotations

import math

import numpy as np

from .chsh import CHSHSettings, f_squared_check, surrogate_assignments
from .ga_core import (
    ATOL,
    DEFAULT_TABLE,
    E12,
    E13,
    E23,
    ONE,
    ZERO,
    Multivector,
    Orientation,
    ProductTable,
    UnitVector3,
    commutator,
    cross,
    geometric_product,
    mu_dot_n,
    scalar,
    vector,
)
from .models import christian_joint_exact, directed_average, estimate_single, claimed_bivector_term
from .pauli_backend import CheckReport, represent, verify_pauli_algebra, verify_pauli_identity

__all__ = [
    "random_unit_vectors",
    "random_multivectors",
    "check_basis_table",
    "check_homomorphism",
    "check_pauli_identity",
    "check_bivector_identity",
    "check_f_squared_surrogate",
    "check_dominance",
    "gating_checks",
    "findings",
    "run_all",
]

_BASIS = (vector(1, 0, 0), vector(0, 1, 0), vector(0, 0, 1))
# I e_l written out by hand so the check does not lean on the table under test
_DUAL = (E23, -E13, E12)
_EPS = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (1, 0, 2): -1, (0, 2, 1): -1, (2, 1, 0): -1}


def random_unit_vectors(rng: np.random.Generator, n: int) -> list[UnitVector3]:
    v = rng.normal(size=(n, 3))
    return [UnitVector3.normalized(*row) for row in v]


def random_multivectors(rng: np.random.Generator, n: int) -> list[Multivector]:
    return [Multivector(row) for row in rng.uniform(-1.0, 1.0, size=(n, 8))]


def _dual_of(c) -> Multivector:
    return _DUAL[0] * float(c[0]) + _DUAL[1] * float(c[1]) + _DUAL[2] * float(c[2])


def check_basis_table(table: ProductTable = DEFAULT_TABLE) -> CheckReport:
    """``e_j e_k = delta_jk + I eps_jkl e_l`` for all nine basis pairs."""
    worst = 0.0
    failed = []
    for j in range(3):
        for k in range(3):
            expected = ONE if j == k else ZERO
            for l in range(3):
                expected = expected + _DUAL[l] * _EPS.get((j, k, l), 0)
            dev = geometric_product(_BASIS[j], _BASIS[k], table).max_deviation(expected)
            if dev > 1e-15:
                failed.append(f"e{j + 1}e{k + 1}")
            worst = max(worst, dev)
    return CheckReport("basis_table", worst, 1e-15, {"failed_pairs": failed} if failed else {})


def check_homomorphism(table: ProductTable = DEFAULT_TABLE, n: int = 1000, seed: int = 0) -> CheckReport:
    """``represent(x y) = represent(x) represent(y)`` on random pairs."""
    rng = np.random.default_rng(seed)
    xs = random_multivectors(rng, n)
    ys = random_multivectors(rng, n)
    worst = 0.0
    for x, y in zip(xs, ys):
        dev = float(np.max(np.abs(represent(geometric_product(x, y, table)) - represent(x) @ represent(y))))
        worst = max(worst, dev)
    return CheckReport("homomorphism", worst, ATOL, {"pairs": n})


def check_pauli_identity(n: int = 1000, seed: int = 1) -> CheckReport:
    rng = np.random.default_rng(seed)
    a = random_unit_vectors(rng, n)
    b = random_unit_vectors(rng, n)
    worst = max(verify_pauli_identity(x, y).max_deviation for x, y in zip(a, b))
    return CheckReport("pauli_identity", worst, ATOL, {"pairs": n})


def check_bivector_identity(table: ProductTable = DEFAULT_TABLE, n: int = 1000, seed: int = 2) -> CheckReport:
    """``(mu.a)(mu.b) = -ab = -a.b - I (a x b)`` for random pairs and orientations."""
    rng = np.random.default_rng(seed)
    a = random_unit_vectors(rng, n)
    b = random_unit_vectors(rng, n)
    signs = rng.integers(0, 2, n) * 2 - 1
    worst = 0.0
    for x, y, s in zip(a, b, signs):
        o = Orientation(int(s))
        lhs = geometric_product(mu_dot_n(o, x), mu_dot_n(o, y), table)
        rhs = scalar(-x.dot(y)) - _dual_of(cross(x, y))
        worst = max(worst, lhs.max_deviation(rhs))
    return CheckReport("bivector_product_identity", worst, ATOL, {"pairs": n})


def check_f_squared_surrogate(n: int = 200, seed: int = 3) -> CheckReport:
    """``F^2 = 4 + [A_a,A_a'][B_b',B_b]`` for commuting scalar outcomes."""
    worst = 0.0
    for _, F in surrogate_assignments():
        worst = max(worst, geometric_product(F, F).max_deviation(4.0))
    rng = np.random.default_rng(seed)
    for _ in range(n):
        lam, *dirs = random_unit_vectors(rng, 5)
        rep = f_squared_check(lam, CHSHSettings(*dirs))
        worst = max(worst, rep.residual)
    return CheckReport("f_squared_identity_scalar_outcomes", worst, ATOL, {"random_trials": n, "assignments": 16})


def check_dominance(points: int = 1001) -> CheckReport:
    """``|t| >= |-1 + (2/pi) arccos t|`` on a uniform grid over [-1, 1]."""
    t = np.linspace(-1.0, 1.0, points)
    gap = np.abs(-1.0 + (2.0 / math.pi) * np.arccos(t)) - np.abs(t)
    violations = int(np.count_nonzero(gap > ATOL))
    return CheckReport("dominance", max(0.0, float(gap.max())), ATOL, {"points": points, "violations": violations})


def gating_checks(table: ProductTable = DEFAULT_TABLE) -> list[CheckReport]:
    return [
        check_basis_table(table),
        check_homomorphism(table),
        verify_pauli_algebra(),
        check_pauli_identity(),
        check_bivector_identity(table),
        check_f_squared_surrogate(),
        check_dominance(),
    ]


def findings(n: int = 100, seed: int = 4) -> dict:
    """Measured gaps between the averaging argument and the algebra."""
    rng = np.random.default_rng(seed)
    a = random_unit_vectors(rng, n)
    b = random_unit_vectors(rng, n)
    biv_avg = max(christian_joint_exact(x, y).value.grade(2).norm() for x, y in zip(a, b))
    claimed_gap = max(
        geometric_product(mu_dot_n(Orientation.MINUS, x), mu_dot_n(Orientation.MINUS, y)).grade(2).max_deviation(
            claimed_bivector_term(Orientation.MINUS, x, y)
        )
        for x, y in zip(a, b)
    )
    comm_avg = 0.0
    for x, y in zip(a, b):
        total = ZERO
        for o in Orientation:
            total = total + commutator(mu_dot_n(o, x), mu_dot_n(o, y))
        comm_avg = max(comm_avg, (total * 0.5).norm())
    single_plain = max(estimate_single("christian", x, "A", mode="exact").value.norm() for x in a)
    single_directed = max(estimate_single("christian", x, "A", mode="directed").value.norm() for x in a)
    joint_directed = [
        directed_average(lambda o, x=x, y=y: geometric_product(mu_dot_n(o, x), mu_dot_n(o, y))) for x, y in zip(a, b)
    ]
    directed_scalar = max(abs(v.scalar_part) for v in joint_directed)
    directed_pseudo_dev = max(abs(v["e123"] + x.dot(y)) for v, x, y in zip(joint_directed, a, b))
    return {
        "settings_sampled": n,
        "christian_joint_average_bivector_max_norm": biv_avg,
        "claimed_bivector_term_deviation_at_o_minus": claimed_gap,
        "averaged_cross_commutator_max_norm": comm_avg,
        "single_party_plain_average_max_norm": single_plain,
        "single_party_directed_average_max_norm": single_directed,
        "joint_directed_average_max_abs_scalar": directed_scalar,
        "joint_directed_average_pseudoscalar_minus_ab_dev": directed_pseudo_dev,
    }


def run_all(table: ProductTable = DEFAULT_TABLE) -> tuple[bool, list[CheckReport], dict]:
    checks = gating_checks(table)
    return all(c.passed for c in checks), checks, findings()
