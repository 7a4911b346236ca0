"""CHSH string evaluation, the F-function and its square, and planar sweeps."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ga_core import (
    ATOL,
    DEFAULT_TABLE,
    Multivector,
    Orientation,
    UnitVector3,
    as_unit_vector,
    commutator,
    geometric_product,
    scalar,
)
from .models import (
    BellVector,
    SamplerConfig,
    _bell_outcomes,
    _christian_outcomes,
    bell_joint_closed,
    bell_outcome,
    christian_joint_exact,
    christian_outcome,
    estimate_joint,
    hidden_state_block,
)
from .pauli_backend import singlet_expectation_joint

__all__ = [
    "TSIRELSON",
    "CLASSICAL_BOUND",
    "CSV_COLUMNS",
    "CHSHSettings",
    "CHSHResult",
    "FSquaredReport",
    "SweepReport",
    "theoretical_bound",
    "chsh_value",
    "f_from_outcomes",
    "f_value",
    "surrogate_assignments",
    "f_squared_check",
    "correlation_matrix",
    "chsh_sweep",
    "chsh_random_search",
]

TSIRELSON = 2.0 * math.sqrt(2.0)
CLASSICAL_BOUND = 2.0
CSV_COLUMNS = ("model", "a_deg", "a′_deg", "b_deg", "b′_deg", "E_ab", "E_ab′", "E_a′b", "E_a′b′", "S", "stderr")

_E_X = UnitVector3(1.0, 0.0, 0.0)
_E_Y = UnitVector3(0.0, 1.0, 0.0)


def theoretical_bound(model: str) -> float:
    return CLASSICAL_BOUND if model == "bell" else TSIRELSON


@dataclass(frozen=True)
class CHSHSettings:
    a: UnitVector3
    a_prime: UnitVector3
    b: UnitVector3
    b_prime: UnitVector3

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, as_unit_vector(getattr(self, name)))

    @classmethod
    def planar(cls, a_deg, a_prime_deg, b_deg, b_prime_deg, plane=(_E_X, _E_Y)) -> "CHSHSettings":
        u, v = plane
        return cls(*(UnitVector3.in_plane(u, v, math.radians(d)) for d in (a_deg, a_prime_deg, b_deg, b_prime_deg)))

    def pairs(self):
        """The four (A setting, B setting) pairs in string order."""
        return ((self.a, self.b), (self.a, self.b_prime), (self.a_prime, self.b), (self.a_prime, self.b_prime))


@dataclass(frozen=True)
class CHSHResult:
    terms: tuple[float, float, float, float]
    string_value: float
    model: str
    mode: str
    standard_error: float = 0.0
    multivector_terms: tuple[Multivector, ...] | None = None


def _combine(t) -> float:
    return ((t[0] + t[1]) + t[2]) - t[3]


def chsh_value(model: str, s: CHSHSettings, cfg: SamplerConfig | None = None, mode: str = "exact") -> CHSHResult:
    """``E(a,b) + E(a,b') + E(a',b) - E(a',b')`` for one model."""
    if model == "bell" and mode == "monte_carlo":
        return _bell_chsh_mc(s, cfg or SamplerConfig())
    ests = [estimate_joint(model, x, y, cfg, mode) for x, y in s.pairs()]
    terms = tuple(e.scalar for e in ests)
    se = math.sqrt(sum(e.standard_error**2 for e in ests))
    mv = tuple(e.value for e in ests) if model == "christian" else None
    return CHSHResult(terms, _combine(terms), model, ests[0].mode, se, mv)


def _bell_chsh_mc(s: CHSHSettings, cfg: SamplerConfig) -> CHSHResult:
    # one shared lambda stream, so every sample contributes F in {-2, +2}
    sums = np.zeros(4, dtype=np.int64)
    f_sum = 0
    for k, size in cfg.blocks():
        lams = hidden_state_block("bell", cfg.seed, k, size)
        Aa = _bell_outcomes(lams, s.a, "A").astype(np.int64)
        Aa2 = _bell_outcomes(lams, s.a_prime, "A").astype(np.int64)
        Bb = _bell_outcomes(lams, s.b, "B").astype(np.int64)
        Bb2 = _bell_outcomes(lams, s.b_prime, "B").astype(np.int64)
        sums += [np.dot(Aa, Bb), np.dot(Aa, Bb2), np.dot(Aa2, Bb), np.dot(Aa2, Bb2)]
        f_sum += int(np.dot(Aa, Bb + Bb2) + np.dot(Aa2, Bb - Bb2))
    n = cfg.sample_count
    terms = tuple(float(x) / n for x in sums)
    mean_f = f_sum / n
    # F^2 = 4 for every sample
    var = max(0.0, 4.0 - mean_f * mean_f) * n / (n - 1) if n > 1 else 0.0
    return CHSHResult(terms, _combine(terms), "bell", "monte_carlo", math.sqrt(var / n))


# ------------------------------------------------------------ F function


def f_from_outcomes(Aa, Aa2, Bb, Bb2) -> Multivector:
    """``A_a (B_b + B_b') + A_a' (B_b - B_b')`` under the geometric product."""
    Aa, Aa2, Bb, Bb2 = (x if isinstance(x, Multivector) else scalar(float(x)) for x in (Aa, Aa2, Bb, Bb2))
    return geometric_product(Aa, Bb + Bb2) + geometric_product(Aa2, Bb - Bb2)


def _outcomes(state, s: CHSHSettings):
    if isinstance(state, BellVector):
        state = state.lam
    if isinstance(state, (Orientation, int, np.integer)):
        o = Orientation(state)
        return (
            christian_outcome(o, s.a, "A"),
            christian_outcome(o, s.a_prime, "A"),
            christian_outcome(o, s.b, "B"),
            christian_outcome(o, s.b_prime, "B"),
        )
    lam = as_unit_vector(state)
    return tuple(
        scalar(float(bell_outcome(lam, n, p)))
        for n, p in ((s.a, "A"), (s.a_prime, "A"), (s.b, "B"), (s.b_prime, "B"))
    )


def f_value(state, s: CHSHSettings) -> Multivector:
    """F for a hidden state.

    An :class:`Orientation` uses the bivector outcomes; a lambda vector (or
    :class:`BellVector`) uses the scalar +-1 outcomes of the sign model.
    """
    return f_from_outcomes(*_outcomes(state, s))


def surrogate_assignments():
    """All 16 scalar +-1 outcome assignments with their F values."""
    out = []
    for Aa, Aa2, Bb, Bb2 in itertools.product((1, -1), repeat=4):
        out.append(((Aa, Aa2, Bb, Bb2), f_from_outcomes(Aa, Aa2, Bb, Bb2)))
    return out


@dataclass
class FSquaredReport:
    direct: Multivector
    via_identity: Multivector
    residual: float
    commutator_product: Multivector
    cross_commutators: dict[str, Multivector] = field(default_factory=dict)

    @property
    def cross_commute(self) -> bool:
        return all(c.is_zero() for c in self.cross_commutators.values())

    @property
    def authoritative(self) -> str:
        return "identity" if self.cross_commute else "direct"

    @property
    def identity_scalar(self) -> float:
        return self.via_identity.scalar_part

    def to_dict(self) -> dict:
        return {
            "direct": str(self.direct),
            "via_identity": str(self.via_identity),
            "residual": self.residual,
            "cross_commute": self.cross_commute,
            "authoritative": self.authoritative,
            "cross_commutator_norms": {k: v.norm() for k, v in self.cross_commutators.items()},
        }


def f_squared_check(state, s: CHSHSettings) -> FSquaredReport:
    """Compare ``F^2`` with ``4 + [A_a, A_a'][B_b', B_b]``.

    The right side presumes every A commutes with every B; the four cross
    commutators are recorded and, when any is nonzero, only ``direct`` is
    meaningful.
    """
    Aa, Aa2, Bb, Bb2 = _outcomes(state, s)
    F = f_from_outcomes(Aa, Aa2, Bb, Bb2)
    direct = geometric_product(F, F)
    cp = geometric_product(commutator(Aa, Aa2), commutator(Bb2, Bb))
    rhs = cp + 4.0
    cross = {
        "[A_a,B_b]": commutator(Aa, Bb),
        "[A_a,B_b′]": commutator(Aa, Bb2),
        "[A_a′,B_b]": commutator(Aa2, Bb),
        "[A_a′,B_b′]": commutator(Aa2, Bb2),
    }
    return FSquaredReport(direct, rhs, direct.max_deviation(rhs), cp, cross)


# ----------------------------------------------------------------- sweeps


def _grid_directions(plane, resolution: int):
    u, v = (as_unit_vector(p) for p in plane)
    if abs(u.dot(v)) > ATOL:
        raise ValueError("plane vectors must be orthogonal")
    degs = np.arange(resolution) * (360.0 / resolution)
    return degs, [UnitVector3.in_plane(u, v, math.radians(d)) for d in degs]


def _scalar_sign_diag() -> np.ndarray:
    # scalar part of X Y is sum_i s_i X_i Y_i, with s_i = sign of blade_i^2
    return np.array([DEFAULT_TABLE.sign[i, i] if DEFAULT_TABLE.index[i, i] == 0 else 0 for i in range(8)], dtype=np.float64)


def correlation_matrix(model: str, dirs, cfg: SamplerConfig | None = None, mode: str = "exact") -> np.ndarray:
    """``M[i, j] = E(dirs[i], dirs[j])`` (scalar part)."""
    R = len(dirs)
    if mode == "monte_carlo" and model in ("bell", "christian"):
        return _mc_correlation_matrix(model, dirs, cfg or SamplerConfig())
    M = np.empty((R, R))
    for i, x in enumerate(dirs):
        for j, y in enumerate(dirs):
            if model == "quantum":
                M[i, j] = singlet_expectation_joint(x, y)
            elif model == "bell" and mode == "exact":
                M[i, j] = bell_joint_closed(x, y)
            elif model == "christian" and mode == "exact":
                M[i, j] = christian_joint_exact(x, y).scalar
            else:
                M[i, j] = estimate_joint(model, x, y, cfg, mode).scalar
    return M


def _mc_correlation_matrix(model: str, dirs, cfg: SamplerConfig) -> np.ndarray:
    R = len(dirs)
    acc = np.zeros((R, R))
    diag = _scalar_sign_diag()
    for k, size in cfg.blocks():
        states = hidden_state_block(model, cfg.seed, k, size)
        if model == "bell":
            A = np.stack([_bell_outcomes(states, d, "A") for d in dirs]).astype(np.float64)
            B = np.stack([_bell_outcomes(states, d, "B") for d in dirs]).astype(np.float64)
            acc += A @ B.T
        else:
            for lo in range(0, size, 4096):
                o = states[lo : lo + 4096]
                A = np.stack([_christian_outcomes(o, d) for d in dirs])
                B = np.stack([_christian_outcomes(o, d) for d in dirs])
                acc += np.tensordot(A * diag, B, axes=([1, 2], [1, 2]))
    return acc / cfg.sample_count


@dataclass
class SweepReport:
    model: str
    mode: str
    resolution: int
    max_abs_S: float
    argmax_settings_deg: tuple[float, float, float, float]
    result: CHSHResult
    bound: float
    samples: int
    seed: int
    matrix: np.ndarray = field(repr=False, default=None)

    @property
    def margin(self) -> float:
        return self.bound - self.max_abs_S

    @property
    def within_bound(self) -> bool:
        return self.max_abs_S <= self.bound + 5.0 * self.result.standard_error + ATOL

    def csv_row(self) -> list:
        return [self.model, *self.argmax_settings_deg, *self.result.terms, self.result.string_value, self.result.standard_error]

    def summary(self) -> dict:
        return {
            "model": self.model,
            "max_abs_S": self.max_abs_S,
            "argmax_settings_deg": list(self.argmax_settings_deg),
            "bound": self.bound,
            "margin": self.margin,
            "samples": self.samples,
            "seed": self.seed,
        }


def chsh_sweep(
    model: str,
    plane=(_E_X, _E_Y),
    resolution: int = 64,
    cfg: SamplerConfig | None = None,
    mode: str = "exact",
) -> SweepReport:
    """Grid search of ``|S|`` over four coplanar settings on ``resolution`` angles each."""
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    degs, dirs = _grid_directions(plane, resolution)
    M = np.ascontiguousarray(correlation_matrix(model, dirs, cfg, mode))
    best, (i, k, j, l) = kernels.chsh_grid_max(M)
    argmax = (float(degs[i]), float(degs[k]), float(degs[j]), float(degs[l]))
    settings = CHSHSettings(dirs[i], dirs[k], dirs[j], dirs[l])
    if mode == "exact" or model == "quantum":
        terms = (M[i, j], M[i, l], M[k, j], M[k, l])
        result = CHSHResult(tuple(float(t) for t in terms), _combine(terms), model, "exact")
        samples, seed = 0, 0
    else:
        cfg = cfg or SamplerConfig()
        result = chsh_value(model, settings, cfg, mode)
        samples, seed = cfg.sample_count, cfg.seed
    return SweepReport(model, result.mode, resolution, float(best), argmax, result, theoretical_bound(model), samples, seed, M)


def chsh_random_search(model: str, restarts: int = 20, seed: int = 0, mode: str = "exact") -> tuple[float, CHSHSettings]:
    """Full-sphere local maximization of ``|S|`` from random starting settings."""
    from scipy.optimize import minimize

    rng = np.random.default_rng(seed)

    def settings_of(x):
        return CHSHSettings(*(UnitVector3.from_spherical(x[2 * q], x[2 * q + 1]) for q in range(4)))

    def neg_abs_s(x):
        return -abs(chsh_value(model, settings_of(x), None, mode).string_value)

    best, best_s = -1.0, None
    for _ in range(restarts):
        x0 = np.column_stack([np.arccos(rng.uniform(-1, 1, 4)), rng.uniform(0, 2 * math.pi, 4)]).ravel()
        res = minimize(neg_abs_s, x0, method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000})
        if -res.fun > best:
            best, best_s = -res.fun, settings_of(res.x)
    return best, best_s
