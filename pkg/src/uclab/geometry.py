"""Exact angles, semicircle and wedge predicates, and the structured support.

Angles are stored as reduced fractions of a full turn, so every boundary test
on grid points is decided in integer arithmetic.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument


@total_ordering
class Angle:
    """A point of the circle as ``num/den`` of a full turn, ``0 <= num < den``."""

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int):
        num, den = int(num), int(den)
        if den <= 0:
            raise InvalidArgument(f"angle denominator must be positive, got {den}")
        num %= den
        g = math.gcd(num, den)
        object.__setattr__(self, "num", num // g)
        object.__setattr__(self, "den", den // g)

    def __setattr__(self, name, value):
        raise AttributeError("Angle is immutable")

    @classmethod
    def from_fraction(cls, x) -> "Angle":
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    @property
    def turns(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def radians(self) -> float:
        return 2 * math.pi * self.num / self.den

    def add_half_turn(self) -> "Angle":
        return Angle(2 * self.num + self.den, 2 * self.den)

    antipode = add_half_turn

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "Angle") -> "Angle":
        return Angle(self.num * other.den - other.num * self.den, self.den * other.den)

    def __eq__(self, other):
        if not isinstance(other, Angle):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __lt__(self, other):
        if not isinstance(other, Angle):
            return NotImplemented
        return self.num * other.den < other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"Angle({self.num}/{self.den})"

    def to_json(self):
        return {"num": self.num, "den": self.den}


def angle_from_turns(num: int, den: int) -> Angle:
    return Angle(num, den)


HALF_TURN = Angle(1, 2)


def _offset(theta: Angle, start: Angle):
    """``(theta - start) mod 1`` as an unreduced (numerator, denominator) pair."""
    den = theta.den * start.den
    return (theta.num * start.den - start.num * theta.den) % den, den


class Label(enum.IntEnum):
    NEG = -1
    POS = 1

    def __neg__(self):
        return Label(-int(self))


class Closure(enum.Enum):
    LEFT_OPEN_RIGHT_CLOSED = "(]"
    LEFT_CLOSED_RIGHT_OPEN = "[)"


@dataclass(frozen=True)
class Semicircle:
    """Homogeneous halfplane: +1 on the half-turn arc starting at ``alpha``."""

    alpha: Angle
    closure: Closure = Closure.LEFT_OPEN_RIGHT_CLOSED

    def complement(self) -> "Semicircle":
        return Semicircle(self.alpha.add_half_turn(), self.closure)

    def rotated(self, by: Angle) -> "Semicircle":
        return Semicircle(self.alpha + by, self.closure)

    def to_json(self):
        return {"type": "semicircle", "alpha": self.alpha.to_json(), "closure": self.closure.value}


def semicircle_classify(s: Semicircle, theta: Angle) -> Label:
    d, den = _offset(theta, s.alpha)
    if s.closure is Closure.LEFT_OPEN_RIGHT_CLOSED:
        inside = 0 < d and 2 * d <= den
    else:
        inside = 2 * d < den
    return Label.POS if inside else Label.NEG


class WedgeKind(enum.Enum):
    G = "G"
    H = "H"


class Openness(enum.Enum):
    HALF_OPEN = "half-open"
    OPEN = "open"


@dataclass(frozen=True)
class WedgeSpec:
    """Symmetric disagreement region of radius ``t`` around the reference boundary.

    ``G`` is ``(0, t] u (1/2, 1/2 + t]`` and ``H`` is ``(1/2 - t, 1/2] u (1 - t, 1]``
    in turns; the open variant drops both arc endpoints.
    """

    kind: WedgeKind
    t: Angle
    openness: Openness = Openness.HALF_OPEN

    def __post_init__(self):
        if self.t.num == 0 or self.t > HALF_TURN:
            raise InvalidArgument(f"wedge radius must lie in (0, 1/2] turn, got {self.t}")


def wedge_contains(w: WedgeSpec, theta: Angle) -> bool:
    t = w.t
    if w.kind is WedgeKind.G:
        starts = (Angle(0, 1), HALF_TURN)
    else:
        starts = (HALF_TURN - t, Angle(0, 1) - t)
    closed = w.openness is Openness.HALF_OPEN
    for start in starts:
        d, den = _offset(theta, start)
        # compare d/den with t.num/t.den
        lhs, rhs = d * t.den, t.num * den
        if d > 0 and (lhs < rhs or (closed and lhs == rhs)):
            return True
    return False


@dataclass(frozen=True)
class InhomHalfspace:
    """``x -> sign(w.x + b)`` with ``sign(0) = +1``."""

    w: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=np.float64))
        object.__setattr__(self, "b", float(self.b))

    @property
    def d(self) -> int:
        return self.w.shape[0]

    @property
    def homogeneous(self) -> bool:
        return self.b == 0.0

    def decision(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.d:
            raise InvalidArgument(f"point dimension {X.shape[-1]} != halfspace dimension {self.d}")
        return X @ self.w + self.b

    def classify_many(self, X) -> np.ndarray:
        return np.where(self.decision(X) >= 0, 1, -1).astype(np.int8)

    def to_json(self):
        return {"type": "halfspace", "w": [float(v) for v in self.w], "b": self.b}


def halfspace_classify(h: InhomHalfspace, x) -> Label:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (h.d,):
        raise InvalidArgument(f"point of shape {x.shape} does not match dimension {h.d}")
    return Label.POS if float(x @ h.w) + h.b >= 0 else Label.NEG


class StructuredSupport:
    """``d/2`` blocks of ``k`` points evenly spaced on orthogonal unit circles.

    Point ``(i, j)`` (0-based) sits at turn ``j/k`` in the coordinate pair
    ``(2i, 2i+1)``; its flat index is ``i*k + j``.
    """

    def __init__(self, d: int, k: int):
        self.d = d
        self.k = k
        j = np.arange(k)
        ang = 2 * np.pi * j / k
        coords = np.zeros((d // 2 * k, d))
        for i in range(d // 2):
            coords[i * k:(i + 1) * k, 2 * i] = np.cos(ang)
            coords[i * k:(i + 1) * k, 2 * i + 1] = np.sin(ang)
        coords.setflags(write=False)
        self.coords = coords

    @property
    def blocks(self) -> int:
        return self.d // 2

    def __len__(self):
        return self.blocks * self.k

    def index(self, i: int, j: int) -> int:
        return i * self.k + j

    def angle(self, i: int, j: int) -> Angle:
        return Angle(j, self.k)

    def point(self, i: int, j: int) -> np.ndarray:
        return self.coords[self.index(i, j)]

    def __repr__(self):
        return f"StructuredSupport(d={self.d}, k={self.k})"


def build_support(d: int, k: int) -> StructuredSupport:
    if d < 2 or d % 2:
        raise InvalidArgument(f"dimension must be even and >= 2, got {d}")
    if k < 2:
        raise InvalidArgument(f"block size must be >= 2, got {k}")
    return StructuredSupport(d, k)


@dataclass(frozen=True)
class BlockLabeling:
    """At most one negative point per block; ``neg[i]`` is its index or None."""

    neg: tuple

    def __post_init__(self):
        object.__setattr__(self, "neg", tuple(None if j is None else int(j) for j in self.neg))

    @classmethod
    def all_positive(cls, blocks: int) -> "BlockLabeling":
        return cls((None,) * blocks)

    @classmethod
    def from_negatives(cls, blocks: int, pairs: Sequence[tuple]) -> "BlockLabeling":
        neg: list[Optional[int]] = [None] * blocks
        for i, j in pairs:
            if neg[i] is not None:
                raise InvalidArgument(f"block {i} already has a negative point")
            neg[i] = j
        return cls(tuple(neg))

    @property
    def negatives(self):
        return [(i, j) for i, j in enumerate(self.neg) if j is not None]

    def validate(self, sup: StructuredSupport):
        if len(self.neg) != sup.blocks:
            raise InvalidArgument(f"labeling has {len(self.neg)} blocks, support has {sup.blocks}")
        for j in self.neg:
            if j is not None and not 0 <= j < sup.k:
                raise InvalidArgument(f"point index {j} outside block of size {sup.k}")

    def labels(self, sup: StructuredSupport) -> np.ndarray:
        self.validate(sup)
        y = np.ones(len(sup), dtype=np.int8)
        for i, j in self.negatives:
            y[sup.index(i, j)] = -1
        return y


def support_bias(k: int) -> float:
    return math.cos(math.pi / (4 * k))


def support_margin(k: int) -> float:
    """Lower bound on ``w.x + b`` at the positive points of a block holding a negative point."""
    return math.cos(math.pi / (4 * k)) - math.cos(2 * math.pi / k)


def labeling_margin(k: int) -> float:
    """Lower bound on ``|w.x + b|`` over every support point; the negative point sits at ``1 - b``."""
    b = math.cos(math.pi / (4 * k))
    return min(b, 1 - b, support_margin(k))


def block_margins(sup: StructuredSupport, y: BlockLabeling, h: InhomHalfspace):
    """Values ``w.x + b`` at positive points sharing a block with a negative point."""
    val = sup.coords @ h.w + h.b
    idx = [sup.index(i, j2) for i, j in y.negatives for j2 in range(sup.k) if j2 != j]
    return val[idx]


def realize_labeling(sup: StructuredSupport, y: BlockLabeling) -> InhomHalfspace:
    y.validate(sup)
    w = np.zeros(sup.d)
    for i, j in y.negatives:
        a = 2 * math.pi * j / sup.k
        w[2 * i] = -math.cos(a)
        w[2 * i + 1] = -math.sin(a)
    return InhomHalfspace(w, support_bias(sup.k))
