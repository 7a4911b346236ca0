"""Cl(3,0) multivector arithmetic over the blade basis
``[1, e1, e2, e3, e12, e13, e23, e123]`` with ``e1, e2, e3 = e_x, e_y, e_z``.

The geometric product is driven by an 8x8 sign/index table built once from
transposition counting. Inner and outer products are masks over the same
table, so every product shares one source of signs.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels

__all__ = [
    "ATOL",
    "BLADES",
    "BLADE_NAMES",
    "GRADES",
    "NormalizationError",
    "ProductTable",
    "build_product_table",
    "DEFAULT_TABLE",
    "Multivector",
    "UnitVector3",
    "Orientation",
    "as_unit_vector",
    "scalar",
    "vector",
    "E1",
    "E2",
    "E3",
    "E12",
    "E13",
    "E23",
    "I",
    "ONE",
    "ZERO",
    "cyclic_bivector_basis",
    "cross",
    "geometric_product",
    "outer_product",
    "inner_product",
    "grade_part",
    "commutator",
    "mu_dot_n",
    "bivector_product_decompose",
    "format_multivector",
    "parse_multivector",
]

ATOL = 1e-12

BLADES: tuple[tuple[int, ...], ...] = ((), (1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3))
BLADE_NAMES: tuple[str, ...] = ("1", "e1", "e2", "e3", "e12", "e13", "e23", "e123")
GRADES = np.array([len(b) for b in BLADES], dtype=np.int8)
_BLADE_INDEX = {b: i for i, b in enumerate(BLADES)}
_NAME_INDEX = {n: i for i, n in enumerate(BLADE_NAMES)}


class NormalizationError(ValueError):
    """A direction that must be unit-norm was not."""


def _blade_product(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, int]:
    """Sign and result index of the product of two basis blades (all e_i^2 = +1)."""
    seq = list(a + b)
    sign = 1
    # bubble sort; each adjacent swap of distinct vectors flips the sign
    for end in range(len(seq) - 1, 0, -1):
        for k in range(end):
            if seq[k] > seq[k + 1]:
                seq[k], seq[k + 1] = seq[k + 1], seq[k]
                sign = -sign
    out: list[int] = []
    for v in seq:
        if out and out[-1] == v:
            out.pop()
        else:
            out.append(v)
    return sign, _BLADE_INDEX[tuple(out)]


@dataclass(frozen=True, eq=False)
class ProductTable:
    """Multiplication table: ``blade[i] * blade[j] = sign[i, j] * blade[index[i, j]]``."""

    sign: np.ndarray
    index: np.ndarray

    def __post_init__(self):
        sign = np.ascontiguousarray(self.sign, dtype=np.int8)
        index = np.ascontiguousarray(self.index, dtype=np.int8)
        if sign.shape != (8, 8) or index.shape != (8, 8):
            raise ValueError("product table must be 8x8")
        if np.any((index < 0) | (index > 7)):
            raise ValueError("product table index out of range")
        sign.flags.writeable = False
        index.flags.writeable = False
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "index", index)
        gi = GRADES[:, None].astype(int)
        gj = GRADES[None, :].astype(int)
        gk = GRADES[index].astype(int)
        outer = np.where(gk == gi + gj, sign, 0).astype(np.int8)
        inner = np.where((gk == np.abs(gi - gj)) & (gi > 0) & (gj > 0), sign, 0).astype(np.int8)
        outer.flags.writeable = False
        inner.flags.writeable = False
        object.__setattr__(self, "outer_sign", outer)
        object.__setattr__(self, "inner_sign", inner)

    def to_dict(self) -> dict:
        return {"sign": self.sign.tolist(), "index": self.index.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ProductTable":
        return cls(np.array(d["sign"]), np.array(d["index"]))


def build_product_table() -> ProductTable:
    sign = np.zeros((8, 8), dtype=np.int8)
    index = np.zeros((8, 8), dtype=np.int8)
    for i, a in enumerate(BLADES):
        for j, b in enumerate(BLADES):
            sign[i, j], index[i, j] = _blade_product(a, b)
    return ProductTable(sign, index)


DEFAULT_TABLE = build_product_table()


class Multivector:
    """Immutable element of Cl(3,0), stored as 8 float64 coefficients.

    ``*`` is the geometric product (or scaling by a number), ``^`` the outer
    product and ``|`` the inner product. Equality is component-wise within
    :data:`ATOL`.
    """

    __slots__ = ("_c",)

    def __init__(self, coefficients: Iterable[float] = ()):
        c = np.array(coefficients, dtype=np.float64).reshape(-1)
        if c.size == 0:
            c = np.zeros(8)
        elif c.size != 8:
            raise ValueError(f"expected 8 coefficients, got {c.size}")
        c.flags.writeable = False
        self._c = c

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Multivector":
        mv = object.__new__(cls)
        arr.flags.writeable = False
        mv._c = arr
        return mv

    @classmethod
    def blade(cls, name: str, coefficient: float = 1.0) -> "Multivector":
        c = np.zeros(8)
        c[_NAME_INDEX[name]] = coefficient
        return cls._wrap(c)

    @property
    def coefficients(self) -> np.ndarray:
        return self._c

    def __getitem__(self, key: Union[int, str]) -> float:
        if isinstance(key, str):
            key = _NAME_INDEX[key]
        return float(self._c[key])

    @property
    def scalar_part(self) -> float:
        return float(self._c[0])

    def grade(self, k: int) -> "Multivector":
        return grade_part(self, k)

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return float(np.sqrt(np.dot(self._c, self._c)))

    def is_zero(self, atol: float = ATOL) -> bool:
        return bool(np.all(np.abs(self._c) <= atol))

    def isclose(self, other, atol: float = ATOL) -> bool:
        other = _coerce(other)
        return bool(np.all(np.abs(self._c - other._c) <= atol))

    def max_deviation(self, other) -> float:
        return float(np.max(np.abs(self._c - _coerce(other)._c)))

    def __eq__(self, other):
        try:
            return self.isclose(other)
        except TypeError:
            return NotImplemented

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, (Multivector, int, float, np.floating, np.integer)):
            return NotImplemented
        return Multivector._wrap(self._c + _coerce(other)._c)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (Multivector, int, float, np.floating, np.integer)):
            return NotImplemented
        return Multivector._wrap(self._c - _coerce(other)._c)

    def __rsub__(self, other):
        if not isinstance(other, (int, float, np.floating, np.integer)):
            return NotImplemented
        return Multivector._wrap(_coerce(other)._c - self._c)

    def __neg__(self):
        return Multivector._wrap(-self._c)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector._wrap(self._c * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector._wrap(self._c * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector._wrap(self._c / float(other))
        return NotImplemented

    def __xor__(self, other):
        return outer_product(self, _coerce(other))

    def __or__(self, other):
        return inner_product(self, _coerce(other))

    def __repr__(self):
        return f"Multivector({format_multivector(self)!r})"

    def __str__(self):
        return format_multivector(self)


def _coerce(x) -> Multivector:
    if isinstance(x, Multivector):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return scalar(float(x))
    raise TypeError(f"cannot treat {type(x).__name__} as a multivector")


def scalar(x: float) -> Multivector:
    c = np.zeros(8)
    c[0] = x
    return Multivector._wrap(c)


def vector(x: float, y: float, z: float) -> Multivector:
    c = np.zeros(8)
    c[1:4] = (x, y, z)
    return Multivector._wrap(c)


@dataclass(frozen=True)
class UnitVector3:
    """A direction in E3. Construction fails unless x^2 + y^2 + z^2 = 1 within 1e-12."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        n2 = self.x * self.x + self.y * self.y + self.z * self.z
        if not math.isfinite(n2) or abs(n2 - 1.0) > ATOL:
            raise NormalizationError(f"vector ({self.x}, {self.y}, {self.z}) has squared norm {n2!r}, not 1")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "UnitVector3":
        n = math.sqrt(x * x + y * y + z * z)
        if n == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return cls(x / n, y / n, z / n)

    @classmethod
    def from_spherical(cls, theta: float, phi: float) -> "UnitVector3":
        """Polar angle ``theta`` from e_z, azimuth ``phi`` from e_x (radians)."""
        st = math.sin(theta)
        return cls(st * math.cos(phi), st * math.sin(phi), math.cos(theta))

    @classmethod
    def in_plane(cls, u: "UnitVector3", v: "UnitVector3", angle: float) -> "UnitVector3":
        """``cos(angle) u + sin(angle) v`` for orthonormal u, v (radians)."""
        c, s = math.cos(angle), math.sin(angle)
        return cls.normalized(c * u.x + s * v.x, c * u.y + s * v.y, c * u.z + s * v.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def to_multivector(self) -> Multivector:
        return vector(self.x, self.y, self.z)

    def dot(self, other: "UnitVector3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __neg__(self) -> "UnitVector3":
        return UnitVector3(-self.x, -self.y, -self.z)


UnitLike = Union[UnitVector3, Sequence[float], np.ndarray]


def as_unit_vector(n: UnitLike) -> UnitVector3:
    if isinstance(n, UnitVector3):
        return n
    x, y, z = (float(v) for v in n)
    return UnitVector3(x, y, z)


class Orientation(enum.IntEnum):
    """Handedness of the hidden trivector: mu = sign * I."""

    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return int(self)

    @property
    def mu(self) -> Multivector:
        return I * float(self)


E1 = Multivector.blade("e1")
E2 = Multivector.blade("e2")
E3 = Multivector.blade("e3")
E12 = Multivector.blade("e12")
E13 = Multivector.blade("e13")
E23 = Multivector.blade("e23")
I = Multivector.blade("e123")
ONE = scalar(1.0)
ZERO = Multivector()


def cyclic_bivector_basis() -> tuple[Multivector, Multivector, Multivector]:
    """``(e_y^e_z, e_z^e_x, e_x^e_y)`` expressed in the lexicographic basis."""
    return E23, -E13, E12


def cross(a: UnitLike, b: UnitLike) -> np.ndarray:
    return np.cross(_as_xyz(a), _as_xyz(b))


def _as_xyz(v) -> np.ndarray:
    if isinstance(v, UnitVector3):
        return v.as_array()
    if isinstance(v, Multivector):
        return v.coefficients[1:4].copy()
    return np.asarray(v, dtype=np.float64).reshape(3)


def geometric_product(l: Multivector, r: Multivector, table: ProductTable = DEFAULT_TABLE) -> Multivector:
    return Multivector._wrap(kernels.gp(l.coefficients, r.coefficients, table.sign, table.index))


def outer_product(l: Multivector, r: Multivector, table: ProductTable = DEFAULT_TABLE) -> Multivector:
    return Multivector._wrap(kernels.gp(l.coefficients, r.coefficients, table.outer_sign, table.index))


def inner_product(l: Multivector, r: Multivector, table: ProductTable = DEFAULT_TABLE) -> Multivector:
    """Grade-|r-s| contraction, extended bilinearly; zero when either factor is a scalar."""
    return Multivector._wrap(kernels.gp(l.coefficients, r.coefficients, table.inner_sign, table.index))


def grade_part(m: Multivector, k: int) -> Multivector:
    if not 0 <= k <= 3:
        return ZERO
    return Multivector._wrap(np.where(GRADES == k, m.coefficients, 0.0))


def commutator(l: Multivector, r: Multivector, table: ProductTable = DEFAULT_TABLE) -> Multivector:
    """``l r - r l``."""
    return geometric_product(l, r, table) - geometric_product(r, l, table)


def mu_dot_n(o: Orientation, n: UnitLike) -> Multivector:
    """The unit bivector ``mu . n = sign * (n_x e23 + n_y e31 + n_z e12)``."""
    n = as_unit_vector(n)
    s = float(Orientation(o))
    c = np.zeros(8)
    c[4] = s * n.z
    c[5] = -s * n.y
    c[6] = s * n.x
    return Multivector._wrap(c)


def bivector_product_decompose(o: Orientation, a: UnitLike, b: UnitLike) -> tuple[float, Multivector]:
    """Split ``(mu.a)(mu.b)`` into its scalar and bivector parts.

    The scalar part is ``-a.b``. The bivector part is computed from the
    product itself, ``-(a ^ b) = -I (a x b)``; it carries no dependence on
    ``o`` because ``mu^2 = -1`` for both orientations.
    """
    a = as_unit_vector(a)
    b = as_unit_vector(b)
    prod = geometric_product(mu_dot_n(o, a), mu_dot_n(o, b))
    return prod.scalar_part, grade_part(prod, 2)


# ---------------------------------------------------------------- text form

_FLOAT_IN_PARENS = r"\([^()]*\)"
_BARE_COEF = r"(?:\d+(?:\.\d*)?|\.\d+)"
_TERM_RE = re.compile(
    rf"^(?P<coef>{_FLOAT_IN_PARENS}|{_BARE_COEF})?(?P<blade>e(?:123|12|13|23|1|2|3))?$"
)


def _format_coef(x: float) -> str:
    s = repr(float(x))
    if "e" in s or "n" in s:  # exponent, inf, nan
        return f"({s})"
    if s.endswith(".0"):
        s = s[:-2]
    return s


def format_multivector(m: Multivector) -> str:
    """Debug rendering such as ``2 + 3e12 - 1e123``; :func:`parse_multivector` inverts it exactly."""
    parts: list[tuple[str, str]] = []
    for name, c in zip(BLADE_NAMES, m.coefficients):
        if c == 0.0:
            continue
        sign = "-" if math.copysign(1.0, c) < 0 else "+"
        body = _format_coef(abs(c))
        if name != "1":
            body += name
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def parse_multivector(text: str) -> Multivector:
    """Parse the grammar produced by :func:`format_multivector`.

    Accepts ``-`` or the unicode minus sign, and repeated blades (summed).
    """
    s = text.replace("−", "-").strip()
    if not s:
        raise ValueError("empty multivector text")
    tokens = re.findall(r"[+-]|[^\s+-]+", _protect_parens(s))
    coeffs = np.zeros(8)
    sign = 1.0
    expect_term = True
    seen_term = False
    for tok in tokens:
        tok = _unprotect(tok)
        if tok in "+-":
            if not expect_term and seen_term:
                expect_term = True
                sign = 1.0
            if tok == "-":
                sign = -sign
            continue
        if not expect_term:
            raise ValueError(f"missing operator before {tok!r} in {text!r}")
        m = _TERM_RE.match(tok)
        if m is None or (m.group("coef") is None and m.group("blade") is None):
            raise ValueError(f"bad term {tok!r} in {text!r}")
        coef = m.group("coef")
        if coef is None:
            value = 1.0
        elif coef.startswith("("):
            value = float(coef[1:-1])
        else:
            value = float(coef)
        blade = m.group("blade") or "1"
        coeffs[_NAME_INDEX[blade]] += sign * value
        sign = 1.0
        expect_term = False
        seen_term = True
    if expect_term:
        raise ValueError(f"dangling operator in {text!r}")
    return Multivector(coeffs)


def _protect_parens(s: str) -> str:
    # signs inside "(1e-07)" must not split the term
    return re.sub(r"\([^()]*\)", lambda m: m.group(0).replace("-", "\x00").replace("+", "\x01").replace(" ", ""), s)


def _unprotect(tok: str) -> str:
    return tok.replace("\x00", "-").replace("\x01", "+")
