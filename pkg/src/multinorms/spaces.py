"""Exponents, finite discrete measure spaces, vectors and plain lp norms.

Everything downstream (summing norms, multi-norms, group diagnostics) is
built on the three value types defined here.  All of them are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

ExponentLike = Union["Exponent", int, float, str, Fraction]

__all__ = [
    "Exponent",
    "DiscreteSpace",
    "Vector",
    "MultiVector",
    "conjugate",
    "lp_norm",
    "lp_norm_values",
    "pairing",
    "scale_by",
    "parse_exponent",
    "space_from_json",
    "multivector_from_json",
    "multivector_to_json",
]


class Exponent:
    """A norm exponent p in [1, inf], with infinity kept as an exact tag.

    Finite values are stored as exact rationals so that the conjugate map
    p -> p' (with 1/p + 1/p' = 1) is an exact involution; no float round
    trip is involved until a numeric value is actually needed.
    """

    __slots__ = ("_frac",)

    def __init__(self, value: ExponentLike):
        if isinstance(value, Exponent):
            frac = value._frac
        elif isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinity", "oo", "∞"):
                frac = None
            else:
                frac = Fraction(text)
        elif isinstance(value, Fraction):
            frac = value
        elif isinstance(value, (int, np.integer)):
            frac = Fraction(int(value))
        elif isinstance(value, (float, np.floating)):
            if math.isinf(value):
                frac = None
            elif math.isnan(value):
                raise ValueError("exponent must not be NaN")
            else:
                frac = Fraction(float(value))
        else:
            raise TypeError(f"cannot build an Exponent from {value!r}")
        if frac is not None and frac < 1:
            raise ValueError(f"exponent must satisfy p >= 1, got {frac}")
        object.__setattr__(self, "_frac", frac)

    @property
    def is_inf(self) -> bool:
        return self._frac is None

    @property
    def fraction(self) -> Fraction | None:
        """Exact value, or None for infinity."""
        return self._frac

    def __float__(self) -> float:
        return math.inf if self._frac is None else float(self._frac)

    def conjugate(self) -> "Exponent":
        if self._frac is None:
            return Exponent(1)
        if self._frac == 1:
            return Exponent("inf")
        return Exponent(self._frac / (self._frac - 1))

    def reciprocal(self) -> Fraction:
        """1/p as an exact rational, with 1/inf = 0."""
        return Fraction(0) if self._frac is None else 1 / self._frac

    def _key(self):
        return math.inf if self._frac is None else self._frac

    def __eq__(self, other) -> bool:
        if not isinstance(other, Exponent):
            try:
                other = Exponent(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._key() == other._key()

    def __le__(self, other) -> bool:
        return self._key() <= Exponent(other)._key()

    def __lt__(self, other) -> bool:
        return self._key() < Exponent(other)._key()

    def __ge__(self, other) -> bool:
        return self._key() >= Exponent(other)._key()

    def __gt__(self, other) -> bool:
        return self._key() > Exponent(other)._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __mul__(self, other: ExponentLike) -> "Exponent":
        other = Exponent(other)
        if self.is_inf or other.is_inf:
            return Exponent("inf")
        return Exponent(self._frac * other._frac)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if self._frac is None:
            return "Exponent(inf)"
        if self._frac.denominator == 1:
            return f"Exponent({self._frac.numerator})"
        return f"Exponent({float(self._frac)})"

    def __str__(self) -> str:
        if self._frac is None:
            return "inf"
        if self._frac.denominator == 1:
            return str(self._frac.numerator)
        return str(float(self._frac))


def conjugate(p: ExponentLike) -> Exponent:
    """Conjugate exponent p' with 1/p + 1/p' = 1; conjugate(1) = inf."""
    return Exponent(p).conjugate()


def parse_exponent(value: ExponentLike) -> Exponent:
    return Exponent(value)


def _readonly(arr: np.ndarray) -> np.ndarray:
    # copy unconditionally: freezing a caller's array in place would be a
    # surprising side effect
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiscreteSpace:
    """A finite set of atoms with strictly positive weights (the measure)."""

    points: tuple
    weights: np.ndarray = field(compare=False)

    def __post_init__(self):
        weights = _readonly(self.weights)
        object.__setattr__(self, "weights", weights)
        if len(self.points) == 0:
            raise ValueError("a discrete space needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise ValueError("point identifiers must be unique")
        if weights.shape != (len(self.points),):
            raise ValueError("one weight per point is required")
        if not np.all(weights > 0):
            raise ValueError("all weights must be strictly positive")

    @property
    def size(self) -> int:
        return len(self.points)

    def index(self, point) -> int:
        return self.points.index(point)

    @staticmethod
    def uniform(size: int, prefix: str = "") -> "DiscreteSpace":
        """Unit-weight space on `size` anonymous points."""
        points = tuple(f"{prefix}{i}" if prefix else i for i in range(size))
        return DiscreteSpace(points, np.ones(size))


@dataclass(frozen=True)
class Vector:
    """A real function on the atoms of a DiscreteSpace."""

    space: DiscreteSpace
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        values = _readonly(self.values)
        object.__setattr__(self, "values", values)
        if values.shape != (self.space.size,):
            raise ValueError("value list length must equal the space size")

    def norm(self, p: ExponentLike) -> float:
        return lp_norm(self, p)


@dataclass(frozen=True)
class MultiVector:
    """An n-tuple of Vectors over one space, stored as an (n, m) array."""

    space: DiscreteSpace
    columns: np.ndarray = field(compare=False)

    def __post_init__(self):
        columns = np.asarray(self.columns, dtype=float)
        if columns.ndim != 2:
            raise ValueError("columns must be a 2-d array (n tuples by m points)")
        columns = _readonly(columns)
        object.__setattr__(self, "columns", columns)
        if columns.shape[1] != self.space.size:
            raise ValueError("each component must have one value per point")
        if columns.shape[0] < 1:
            raise ValueError("a multivector has at least one component")

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def m(self) -> int:
        return self.columns.shape[1]

    def component(self, i: int) -> Vector:
        return Vector(self.space, self.columns[i])

    @staticmethod
    def from_vectors(vectors: Sequence[Vector]) -> "MultiVector":
        if not vectors:
            raise ValueError("need at least one vector")
        space = vectors[0].space
        for v in vectors[1:]:
            if v.space is not space and v.space != space:
                raise ValueError("all components must share one space")
        return MultiVector(space, np.stack([v.values for v in vectors]))


def lp_norm_values(values: np.ndarray, p: ExponentLike,
                   weights: np.ndarray | None = None) -> float:
    """Weighted lp norm of a raw value array; p = inf is the unweighted max."""
    p = Exponent(p)
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if p.is_inf:
        return float(np.max(np.abs(values)))
    pf = float(p)
    absv = np.abs(values)
    if weights is None:
        if pf == 1.0:
            return float(absv.sum())
        return float((absv ** pf).sum() ** (1.0 / pf))
    weights = np.asarray(weights, dtype=float)
    if pf == 1.0:
        return float((weights * absv).sum())
    return float((weights * absv ** pf).sum() ** (1.0 / pf))


def lp_norm(f: Vector, p: ExponentLike) -> float:
    """Norm of f in lp over its weighted space; essential sup for p = inf."""
    return lp_norm_values(f.values, p, f.space.weights)


def pairing(f: Vector, lam: Vector) -> float:
    """Duality pairing <f, lam> = sum_k w_k f(k) lam(k)."""
    if f.space != lam.space:
        raise ValueError("pairing needs vectors over the same space")
    return float(np.dot(f.space.weights * f.values, lam.values))


def scale_by(alpha: Sequence[float], x: MultiVector) -> MultiVector:
    """Coordinatewise scaling (alpha_1 x_1, ..., alpha_n x_n)."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (x.n,):
        raise ValueError(f"need exactly {x.n} scaling coefficients, got {alpha.shape}")
    return MultiVector(x.space, alpha[:, None] * x.columns)


def space_from_json(doc: dict) -> DiscreteSpace:
    vectors = doc.get("vectors")
    npoints = None
    if vectors:
        npoints = len(vectors[0])
    points = doc.get("points")
    if points is None:
        if npoints is None:
            raise ValueError("JSON document has neither points nor vectors")
        points = list(range(npoints))
    weights = doc.get("weights")
    if weights is None:
        weights = np.ones(len(points))
    return DiscreteSpace(tuple(points), np.asarray(weights, dtype=float))


def multivector_from_json(doc: Union[dict, str]) -> MultiVector:
    """Parse {"points": [...], "weights": [...], "vectors": [[...], ...]}."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    space = space_from_json(doc)
    vectors = doc.get("vectors")
    if not vectors:
        raise ValueError("JSON document needs a non-empty 'vectors' field")
    return MultiVector(space, np.asarray(vectors, dtype=float))


def multivector_to_json(x: MultiVector) -> dict:
    return {
        "points": list(x.space.points),
        "weights": x.space.weights.tolist(),
        "vectors": x.columns.tolist(),
    }
