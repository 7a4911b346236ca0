"""Local hidden-variable models and their expectation estimators.

Two models are provided next to the quantum oracle:

``bell``
    hidden unit vector lambda, outcomes ``A = sign(lambda.a)``,
    ``B = -sign(lambda.b)``.
``christian``
    hidden orientation ``o`` with ``mu = o I``; both parties report the
    bivector ``mu . n``.

Every estimator draws hidden states before it sees a setting and hands each
outcome function exactly one setting, so the factorized local form holds by
construction. Monte Carlo draws come in fixed blocks, each seeded from
``SeedSequence(seed, spawn_key=(block,))``, which makes results independent of
how blocks are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Union

import numpy as np

from . import kernels
from .ga_core import (
    DEFAULT_TABLE,
    I,
    ZERO,
    Multivector,
    Orientation,
    UnitLike,
    UnitVector3,
    as_unit_vector,
    cross,
    geometric_product,
    mu_dot_n,
    vector,
)
from .pauli_backend import singlet_expectation_joint, singlet_expectation_single

__all__ = [
    "MODELS",
    "MODES",
    "BLOCK_SIZE",
    "BellVector",
    "ChristianOrientation",
    "HiddenState",
    "SamplerConfig",
    "CorrelationEstimate",
    "bell_outcome",
    "bell_joint_closed",
    "christian_outcome",
    "christian_joint_exact",
    "directed_average",
    "claimed_bivector_term",
    "sample_unit_vector",
    "sample_unit_vectors",
    "hidden_state_block",
    "estimate_joint",
    "estimate_single",
]

MODELS = ("quantum", "bell", "christian")
MODES = ("exact", "monte_carlo", "directed")
BLOCK_SIZE = 1 << 16

Party = Literal["A", "B"]
Mode = Literal["exact", "monte_carlo", "directed"]


@dataclass(frozen=True)
class BellVector:
    lam: UnitVector3


@dataclass(frozen=True)
class ChristianOrientation:
    o: Orientation


HiddenState = Union[BellVector, ChristianOrientation]


@dataclass(frozen=True)
class SamplerConfig:
    """Seed and sample count for Monte Carlo estimators.

    ``shards`` only changes how blocks are distributed over threads; it never
    changes the result.
    """

    seed: int = 0
    sample_count: int = 100_000
    shards: int = 1

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if not isinstance(self.sample_count, (int, np.integer)) or self.sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count!r}")
        if self.shards < 1:
            raise ValueError(f"shards must be >= 1, got {self.shards!r}")

    def blocks(self) -> list[tuple[int, int]]:
        full, rest = divmod(self.sample_count, BLOCK_SIZE)
        out = [(k, BLOCK_SIZE) for k in range(full)]
        if rest:
            out.append((full, rest))
        return out


@dataclass(frozen=True)
class CorrelationEstimate:
    value: Multivector
    sample_count: int
    standard_error: float
    mode: str

    @property
    def scalar(self) -> float:
        return self.value.scalar_part


# ------------------------------------------------------------------ bell


def bell_outcome(lam: UnitLike, n: UnitLike, party: Party) -> int:
    """``sign(lambda . n)`` for A and its negative for B.

    When ``lambda . n == 0`` exactly, the sign of the first nonzero component
    of ``n`` is used instead.
    """
    lam = as_unit_vector(lam)
    n = as_unit_vector(n)
    d = lam.dot(n)
    if d > 0.0:
        v = 1
    elif d < 0.0:
        v = -1
    else:
        v = next((1 if c > 0 else -1 for c in (n.x, n.y, n.z) if c != 0.0), 0)
    if party == "A":
        return v
    if party == "B":
        return -v
    raise ValueError(f"party must be 'A' or 'B', got {party!r}")


def bell_joint_closed(a: UnitLike, b: UnitLike) -> float:
    """``-1 + (2/pi) arccos(a . b)``."""
    t = as_unit_vector(a).dot(as_unit_vector(b))
    return -1.0 + (2.0 / math.pi) * math.acos(min(1.0, max(-1.0, t)))


def sample_unit_vector(rng: np.random.Generator) -> UnitVector3:
    """Isotropic direction: z uniform on [-1, 1], azimuth uniform on [0, 2 pi)."""
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    r = math.sqrt(max(0.0, 1.0 - z * z))
    return UnitVector3.normalized(r * math.cos(phi), r * math.sin(phi), z)


def sample_unit_vectors(rng: np.random.Generator, size: int) -> np.ndarray:
    """Array version of :func:`sample_unit_vector`, shape ``(size, 3)``."""
    z = rng.uniform(-1.0, 1.0, size)
    phi = rng.uniform(0.0, 2.0 * math.pi, size)
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    out = np.empty((size, 3))
    out[:, 0] = r * np.cos(phi)
    out[:, 1] = r * np.sin(phi)
    out[:, 2] = z
    return out


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(block,))))


def hidden_state_block(model: str, seed: int, block: int, size: int) -> np.ndarray:
    """Hidden states for one block; depends on nothing but its arguments.

    ``bell`` gives lambda vectors ``(size, 3)``, ``christian`` orientation signs
    ``(size,)`` as int8.
    """
    rng = _block_rng(seed, block)
    if model == "bell":
        return sample_unit_vectors(rng, size)
    if model == "christian":
        return (rng.integers(0, 2, size, dtype=np.int8) * 2 - 1).astype(np.int8)
    raise ValueError(f"no hidden-state sampler for model {model!r}")


def _bell_outcomes(lams: np.ndarray, n: UnitVector3, party: Party) -> np.ndarray:
    return kernels.party_outcomes(lams, n.x, n.y, n.z, party == "B")


# ------------------------------------------------------------- christian


def christian_outcome(o: Orientation, n: UnitLike, party: Party) -> Multivector:
    """Both parties observe ``mu . n``."""
    if party not in ("A", "B"):
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    return mu_dot_n(o, n)


def _christian_outcomes(orients: np.ndarray, n: UnitVector3) -> np.ndarray:
    return orients[:, None].astype(np.float64) * mu_dot_n(Orientation.PLUS, n).coefficients


def christian_joint_exact(a: UnitLike, b: UnitLike) -> CorrelationEstimate:
    """Average of ``(mu.a)(mu.b)`` over both orientations, weight 1/2 each."""
    a = as_unit_vector(a)
    b = as_unit_vector(b)
    total = ZERO
    for o in Orientation:
        total = total + geometric_product(christian_outcome(o, a, "A"), christian_outcome(o, b, "B"))
    return CorrelationEstimate(total * 0.5, 2, 0.0, "exact")


def directed_average(f: Callable[[Orientation], Multivector]) -> Multivector:
    """``1/2 sum_o I f(o)``: the orientation average taken with volume element I."""
    total = ZERO
    for o in Orientation:
        total = total + geometric_product(I, f(o))
    return total * 0.5


def claimed_bivector_term(o: Orientation, a: UnitLike, b: UnitLike) -> Multivector:
    """``-mu (a x b)`` with the cross product held fixed while ``mu`` flips.

    This is the orientation-odd bivector the averaging argument relies on; it
    coincides with the true bivector part of ``(mu.a)(mu.b)`` only for
    ``o = +1``.
    """
    c = cross(as_unit_vector(a), as_unit_vector(b))
    return -geometric_product(Orientation(o).mu, vector(*c))


# ------------------------------------------------------------ estimators


def _map_blocks(fn, cfg: SamplerConfig) -> list:
    blocks = cfg.blocks()
    if cfg.shards > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.shards) as pool:
            return list(pool.map(lambda kb: fn(*kb), blocks))
    return [fn(k, size) for k, size in blocks]


def _check_cfg(cfg: SamplerConfig | None) -> SamplerConfig:
    if cfg is None:
        return SamplerConfig()
    if cfg.sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    return cfg


def _scalar_mc(total: int, n: int, mode: str) -> CorrelationEstimate:
    mean = total / n
    var = max(0.0, 1.0 - mean * mean) * n / (n - 1) if n > 1 else 0.0
    return CorrelationEstimate(Multivector([mean, 0, 0, 0, 0, 0, 0, 0]), n, math.sqrt(var / n), mode)


def _multivector_mc(blocks: list[tuple[np.ndarray, np.ndarray]], n: int) -> CorrelationEstimate:
    s = np.zeros(8)
    s2 = np.zeros(8)
    for bs, bs2 in blocks:
        s = s + bs
        s2 = s2 + bs2
    mean = s / n
    var = np.maximum(0.0, s2 / n - mean * mean) * (n / (n - 1) if n > 1 else 0.0)
    return CorrelationEstimate(Multivector(mean), n, float(math.sqrt(np.sum(var) / n)), "monte_carlo")


def estimate_joint(
    model: str,
    a: UnitLike,
    b: UnitLike,
    cfg: SamplerConfig | None = None,
    mode: Mode = "monte_carlo",
) -> CorrelationEstimate:
    """Expectation of the product of the two local outcomes.

    ``quantum`` is always exact. ``bell`` supports ``exact`` (closed form) and
    ``monte_carlo``. ``christian`` supports ``exact`` (plain orientation
    average), ``directed`` (average with volume element I) and
    ``monte_carlo``.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    a = as_unit_vector(a)
    b = as_unit_vector(b)
    if model == "quantum":
        return CorrelationEstimate(Multivector([singlet_expectation_joint(a, b), 0, 0, 0, 0, 0, 0, 0]), 0, 0.0, "exact")
    if model == "bell":
        if mode == "exact":
            return CorrelationEstimate(Multivector([bell_joint_closed(a, b), 0, 0, 0, 0, 0, 0, 0]), 0, 0.0, "exact")
        if mode == "directed":
            raise ValueError("directed mode is defined only for the christian model")
        cfg = _check_cfg(cfg)

        def bell_block(k: int, size: int) -> int:
            lams = hidden_state_block("bell", cfg.seed, k, size)
            A = _bell_outcomes(lams, a, "A")
            B = _bell_outcomes(lams, b, "B")
            return 2 * int(np.count_nonzero(A == B)) - size

        return _scalar_mc(sum(_map_blocks(bell_block, cfg)), cfg.sample_count, "monte_carlo")
    if model == "christian":
        if mode == "exact":
            return christian_joint_exact(a, b)
        if mode == "directed":
            value = directed_average(
                lambda o: geometric_product(christian_outcome(o, a, "A"), christian_outcome(o, b, "B"))
            )
            return CorrelationEstimate(value, 2, 0.0, "directed")
        cfg = _check_cfg(cfg)

        def christian_block(k: int, size: int):
            orients = hidden_state_block("christian", cfg.seed, k, size)
            prod = kernels.gp_batch(
                _christian_outcomes(orients, a), _christian_outcomes(orients, b), DEFAULT_TABLE.sign, DEFAULT_TABLE.index
            )
            return prod.sum(axis=0), (prod * prod).sum(axis=0)

        return _multivector_mc(_map_blocks(christian_block, cfg), cfg.sample_count)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def estimate_single(
    model: str,
    n: UnitLike,
    party: Party = "A",
    cfg: SamplerConfig | None = None,
    mode: Mode = "monte_carlo",
) -> CorrelationEstimate:
    """Expectation of one party's outcome alone."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if party not in ("A", "B"):
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    n = as_unit_vector(n)
    if model == "quantum":
        return CorrelationEstimate(Multivector([singlet_expectation_single(n, party), 0, 0, 0, 0, 0, 0, 0]), 0, 0.0, "exact")
    if model == "bell":
        if mode != "monte_carlo":
            # the hemisphere average vanishes identically
            return CorrelationEstimate(ZERO, 0, 0.0, "exact")
        cfg = _check_cfg(cfg)

        def bell_block(k: int, size: int) -> int:
            lams = hidden_state_block("bell", cfg.seed, k, size)
            return int(_bell_outcomes(lams, n, party).sum(dtype=np.int64))

        return _scalar_mc(sum(_map_blocks(bell_block, cfg)), cfg.sample_count, "monte_carlo")
    if model == "christian":
        if mode == "exact":
            total = ZERO
            for o in Orientation:
                total = total + christian_outcome(o, n, party)
            return CorrelationEstimate(total * 0.5, 2, 0.0, "exact")
        if mode == "directed":
            return CorrelationEstimate(directed_average(lambda o: christian_outcome(o, n, party)), 2, 0.0, "directed")
        cfg = _check_cfg(cfg)

        def christian_block(k: int, size: int):
            out = _christian_outcomes(hidden_state_block("christian", cfg.seed, k, size), n)
            return out.sum(axis=0), (out * out).sum(axis=0)

        return _multivector_mc(_map_blocks(christian_block, cfg), cfg.sample_count)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
