"""Finite labeled distributions with exact rational masses.

Circle atoms live on an integer grid: an atom at grid position ``p`` sits at
``p / grid`` of a turn, and masses are integer weights over a common
denominator. All errors come out as exact ``Fraction`` values.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import InvalidArgument, InvalidDistribution, UndefinedEmpiricalError
from .geometry import Angle, Closure, InhomHalfspace, Label, Semicircle, StructuredSupport

SCHEMA_VERSION = 1
_INT64_SAFE = 1 << 62


class Mode(enum.Enum):
    CIRCLE2D = "circle2d"
    STRUCTURED = "structured"


@dataclass(frozen=True)
class LabeledAtom:
    location: Union[Angle, int]
    label: Label
    mass: Fraction


def _int_array(values, bound):
    """int64 when every entry is safely below ``bound``, otherwise Python ints."""
    if bound < _INT64_SAFE:
        return np.asarray(values, dtype=np.int64)
    return np.asarray([int(v) for v in values], dtype=object)


def _lcm(values):
    return reduce(math.lcm, values, 1)


class LabeledDist:
    """Immutable finite-support distribution over (location, label) pairs."""

    def __init__(self, mode: Mode, loc, lab, weights, *, grid: int = 0,
                 support: Optional[StructuredSupport] = None):
        self.mode = mode
        self.grid = int(grid)
        self.support = support
        self.loc = loc
        self.lab = np.asarray(lab, dtype=np.int8)
        self.weights = weights
        self.mass_den = int(weights.sum()) if len(weights) else 0
        for a in (self.loc, self.lab, self.weights):
            a.setflags(write=False)

    # ----- views -------------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.lab)

    def __len__(self):
        return self.m

    def mass(self, q: int) -> Fraction:
        return Fraction(int(self.weights[q]), self.mass_den)

    def location(self, q: int):
        if self.mode is Mode.CIRCLE2D:
            return Angle(int(self.loc[q]), self.grid)
        return int(self.loc[q])

    @property
    def atoms(self) -> list:
        return [LabeledAtom(self.location(q), Label(int(self.lab[q])), self.mass(q))
                for q in range(self.m)]

    @cached_property
    def is_uniform(self) -> bool:
        return self.m > 0 and bool(np.all(self.weights == self.weights[0]))

    @cached_property
    def cumulative(self):
        return np.cumsum(self.weights)

    @cached_property
    def sorted_view(self):
        """(order, positions, labels, weights) sorted by grid position."""
        order = np.argsort(self.loc, kind="stable")
        return order, self.loc[order], self.lab[order], self.weights[order]

    def angles(self) -> list:
        return [self.location(q) for q in range(self.m)]

    def coords(self) -> np.ndarray:
        """Float coordinates of every atom (unit circle in 2D mode)."""
        if self.mode is Mode.STRUCTURED:
            return self.support.coords[np.asarray(self.loc, dtype=np.int64)]
        t = np.array([2 * math.pi * int(p) / self.grid for p in self.loc])
        return np.column_stack([np.cos(t), np.sin(t)])

    # ----- transformations ---------------------------------------------
    def regrid(self, grid: int) -> "LabeledDist":
        """Same distribution expressed on a finer grid (``grid`` a multiple of the current one)."""
        if self.mode is not Mode.CIRCLE2D or grid == self.grid:
            return self
        if grid % self.grid:
            raise InvalidArgument(f"grid {grid} is not a multiple of {self.grid}")
        f = grid // self.grid
        loc = _int_array([int(p) * f for p in self.loc], grid)
        return LabeledDist(self.mode, loc, self.lab, self.weights, grid=grid)

    def rotated(self, by: Angle) -> "LabeledDist":
        """Rotate every atom by ``by``; atom order (and thus sample alignment) is kept."""
        if self.mode is not Mode.CIRCLE2D:
            raise InvalidArgument("only circle distributions can be rotated")
        grid = math.lcm(self.grid, by.den)
        f = grid // self.grid
        shift = by.num * (grid // by.den)
        loc = _int_array([(int(p) * f + shift) % grid for p in self.loc], grid)
        return LabeledDist(self.mode, loc, self.lab, self.weights, grid=grid)

    def with_labels(self, lab) -> "LabeledDist":
        return LabeledDist(self.mode, self.loc, lab, self.weights, grid=self.grid,
                           support=self.support)

    def __repr__(self):
        return f"LabeledDist({self.mode.value}, m={self.m})"


def make_dist(atoms: Sequence, mode: Optional[Mode] = None,
              support: Optional[StructuredSupport] = None) -> LabeledDist:
    """Build a distribution from ``(location, label, mass)`` triples or LabeledAtoms.

    Duplicate (location, label) pairs are merged by adding their masses.
    """
    merged: dict = {}
    for a in atoms:
        if isinstance(a, LabeledAtom):
            loc, label, mass = a.location, a.label, a.mass
        else:
            loc, label, mass = a
        mass = Fraction(mass)
        if mass < 0:
            raise InvalidDistribution(f"negative mass {mass}")
        key = (loc, int(label))
        merged[key] = merged.get(key, Fraction(0)) + mass
    if not merged:
        raise InvalidDistribution("distribution has no atoms")
    total = sum(merged.values(), Fraction(0))
    if total != 1:
        raise InvalidDistribution(f"masses sum to {total}, not 1")
    locs = [k[0] for k in merged]
    if mode is None:
        mode = Mode.CIRCLE2D if isinstance(locs[0], Angle) else Mode.STRUCTURED
    den = _lcm(m.denominator for m in merged.values())
    weights = _int_array([m.numerator * (den // m.denominator) for m in merged.values()], den)
    labels = [k[1] for k in merged]
    if any(v not in (-1, 1) for v in labels):
        raise InvalidDistribution("labels must be -1 or +1")
    if mode is Mode.CIRCLE2D:
        if not all(isinstance(l, Angle) for l in locs):
            raise InvalidDistribution("circle atoms need Angle locations")
        grid = _lcm([l.den for l in locs] + [2])
        loc = _int_array([l.num * (grid // l.den) for l in locs], grid)
        return LabeledDist(mode, loc, labels, weights, grid=grid)
    if support is None:
        raise InvalidDistribution("structured distributions need a support")
    if not all(isinstance(l, (int, np.integer)) and 0 <= l < len(support) for l in locs):
        raise InvalidDistribution("structured atoms need support point indices")
    return LabeledDist(mode, np.asarray(locs, dtype=np.int64), labels, weights, support=support)


def uniform_circle(m: int, target: Optional[Semicircle] = None, grid: Optional[int] = None) -> LabeledDist:
    """``m`` equal atoms at turns ``j/m``, labeled by ``target`` (all +1 if None)."""
    if m < 1:
        raise InvalidArgument("need at least one atom")
    grid = grid or math.lcm(m, 2, target.alpha.den if target else 1)
    if grid % m or grid % 2:
        raise InvalidArgument("grid must be an even multiple of m")
    loc = _int_array(range(0, grid, grid // m), grid) if grid >= _INT64_SAFE else \
        np.arange(m, dtype=np.int64) * (grid // m)
    weights = np.ones(m, dtype=np.int64)
    dist = LabeledDist(Mode.CIRCLE2D, loc, np.ones(m, dtype=np.int8), weights, grid=grid)
    return label_by_target(dist, target) if target is not None else dist


def uniform_structured(support: StructuredSupport, labels=None) -> LabeledDist:
    m = len(support)
    lab = np.ones(m, dtype=np.int8) if labels is None else np.asarray(labels, dtype=np.int8)
    return LabeledDist(Mode.STRUCTURED, np.arange(m, dtype=np.int64), lab,
                       np.ones(m, dtype=np.int64), support=support)


def grid_classify(pos, grid: int, s: Semicircle) -> np.ndarray:
    """Vectorized exact semicircle labels for grid positions ``pos / grid``."""
    big = math.lcm(grid, s.alpha.den)
    f = big // grid
    a = s.alpha.num * (big // s.alpha.den)
    if big < _INT64_SAFE and pos.dtype != object:
        d = (np.asarray(pos, dtype=np.int64) * f - a) % big
    else:
        d = np.array([(int(p) * f - a) % big for p in pos], dtype=object)
    if s.closure is Closure.LEFT_OPEN_RIGHT_CLOSED:
        inside = (d > 0) & (2 * d <= big)
    else:
        inside = 2 * d < big
    return np.where(inside.astype(bool), 1, -1).astype(np.int8)


def predict(dist: LabeledDist, h) -> np.ndarray:
    """Labels ``h`` assigns to every atom location."""
    if isinstance(h, Semicircle):
        if dist.mode is not Mode.CIRCLE2D:
            raise InvalidArgument("semicircles classify circle distributions only")
        return grid_classify(dist.loc, dist.grid, h)
    if isinstance(h, InhomHalfspace):
        return h.classify_many(dist.coords())
    raise InvalidArgument(f"unsupported hypothesis {type(h).__name__}")


def label_by_target(atoms, target) -> LabeledDist:
    """Relabel every atom by ``target``.

    ``atoms`` is a LabeledDist or a sequence of ``(location, mass)`` pairs.
    """
    if not isinstance(atoms, LabeledDist):
        atoms = make_dist([(loc, Label.POS, mass) for loc, mass in atoms])
    lab = predict(atoms, target)
    distinct = len(set(atoms.loc.tolist())) if atoms.loc.dtype == object else len(np.unique(atoms.loc))
    if distinct == atoms.m:
        return atoms.with_labels(lab)
    return make_dist([(atoms.location(q), int(lab[q]), atoms.mass(q)) for q in range(atoms.m)],
                     mode=atoms.mode, support=atoms.support)


@dataclass(frozen=True, eq=False)
class Sample:
    """Per-atom multiplicities of ``n`` draws from ``dist``."""

    dist: LabeledDist
    counts: np.ndarray
    seed: Optional[int] = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.dist.m,):
            raise InvalidArgument("counts must have one entry per atom")
        if np.any(counts < 0):
            raise InvalidArgument("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return int(self.counts.sum())


def sample_n(dist: LabeledDist, n: int, seed: int) -> Sample:
    """``n`` i.i.d. draws by inverse CDF on counter-based variates keyed by ``seed``."""
    if n < 0:
        raise InvalidArgument("n must be nonnegative")
    seed = int(seed) & ((1 << 64) - 1)
    if n == 0:
        counts = np.zeros(dist.m, dtype=np.int64)
    elif dist.is_uniform:
        counts = kernels.count_uniform(seed, n, dist.m)
    elif dist.mass_den < (1 << 63) and dist.weights.dtype != object:
        counts = kernels.count_cdf(seed, n, np.ascontiguousarray(dist.cumulative, dtype=np.int64),
                                   dist.mass_den)
    else:
        counts = _count_cdf_bigint(dist, n, seed)
    return Sample(dist, counts, seed, {"seed": seed, "n": n})


def _count_cdf_bigint(dist, n, seed):
    from bisect import bisect_right
    from .rng import variate
    cum = [int(v) for v in dist.cumulative]
    counts = np.zeros(dist.m, dtype=np.int64)
    for j in range(n):
        r = (variate(seed, j) * dist.mass_den) >> 64
        counts[bisect_right(cum, r)] += 1
    return counts


def true_error(dist: LabeledDist, h) -> Fraction:
    wrong = predict(dist, h) != dist.lab
    return Fraction(int(dist.weights[wrong].sum()), dist.mass_den)


def empirical_error(sample: Sample, h) -> Fraction:
    n = sample.n
    if n == 0:
        raise UndefinedEmpiricalError("empirical error of an empty sample")
    wrong = predict(sample.dist, h) != sample.dist.lab
    return Fraction(int(sample.counts[wrong].sum()), n)


# ----- JSON files -------------------------------------------------------------

def dist_to_json(dist: LabeledDist) -> dict:
    atoms = []
    for a in dist.atoms:
        rec = {"label": int(a.label), "mass_num": a.mass.numerator, "mass_den": a.mass.denominator}
        if dist.mode is Mode.CIRCLE2D:
            rec = {"num": a.location.num, "den": a.location.den, **rec}
        else:
            rec = {"index": a.location, **rec}
        atoms.append(rec)
    out = {"schema_version": SCHEMA_VERSION, "mode": dist.mode.value, "atoms": atoms}
    if dist.mode is Mode.STRUCTURED:
        out["d"], out["k"] = dist.support.d, dist.support.k
    return out


def dist_from_json(obj: dict) -> LabeledDist:
    from .geometry import build_support
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise InvalidDistribution(f"unsupported schema version {obj.get('schema_version')!r}")
    mode = Mode(obj["mode"])
    triples = []
    for a in obj["atoms"]:
        mass = Fraction(a["mass_num"], a["mass_den"])
        loc = Angle(a["num"], a["den"]) if mode is Mode.CIRCLE2D else int(a["index"])
        triples.append((loc, int(a["label"]), mass))
    support = build_support(obj["d"], obj["k"]) if mode is Mode.STRUCTURED else None
    return make_dist(triples, mode=mode, support=support)


def save_dist(dist: LabeledDist, path) -> None:
    with open(path, "w") as fh:
        json.dump(dist_to_json(dist), fh, indent=1)


def load_dist(path) -> LabeledDist:
    with open(path) as fh:
        return dist_from_json(json.load(fh))
