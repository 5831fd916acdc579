"""Exact oracles over homogeneous halfplanes (semicircles of directions).

Every oracle reduces to one rotating sweep over the shift circle. As the
shift ``alpha`` moves, atom ``theta`` flips to +1 at ``theta - 1/2`` and back to
-1 at ``theta``; between consecutive flip positions the true and empirical
errors are constant. For the ``(alpha, alpha + 1/2]`` convention each atom's
label is right-continuous in ``alpha``, so the value at a flip position equals
the value on the arc that starts there, and the supremum over all shifts is a
maximum over arcs. The mirrored ``[alpha, alpha + 1/2)`` convention attains the
same set of values, so suprema do not depend on the closure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels, _kernels_py
from .distributions import LabeledDist, Mode, Sample, grid_classify
from .errors import EmptyBand, InvalidArgument, InvalidInput
from .geometry import Angle, Closure, Semicircle

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class ArcProfile:
    """Misclassified weight and count on each arc ``[starts[g], starts[g+1])``."""

    grid: int
    starts: np.ndarray
    err_d: np.ndarray
    err_s: np.ndarray
    mass_den: int
    n: int

    def __len__(self):
        return len(self.starts)

    def arc(self, g: int):
        nxt = self.starts[(g + 1) % len(self.starts)]
        return Angle(int(self.starts[g]), self.grid), Angle(int(nxt), self.grid)

    def er_d(self, g: int) -> Fraction:
        return Fraction(int(self.err_d[g]), self.mass_den)

    def er_s(self, g: int) -> Fraction:
        return Fraction(int(self.err_s[g]), self.n)

    def band_mask(self, i: int) -> np.ndarray:
        """Arcs whose true error lies in ``(2^-i, 2^-i+1]``."""
        if i < 1:
            raise InvalidArgument("band index must be >= 1")
        lo = self.mass_den >> i
        hi = self.mass_den >> (i - 1)
        return (self.err_d > lo) & (self.err_d <= hi)

    def deviation_keys(self):
        """``n * err_d - M * err_s``: deviation scaled by ``M * n``."""
        big = max(int(self.err_d.max(initial=0)) * self.n, int(self.err_s.max(initial=0)) * self.mass_den)
        if big < _INT64_SAFE and self.err_d.dtype != object:
            return self.err_d * self.n - self.err_s * self.mass_den
        return np.array([int(d) * self.n - int(s) * self.mass_den
                         for d, s in zip(self.err_d, self.err_s)], dtype=object)


def arc_profile(dist: LabeledDist, counts) -> ArcProfile:
    if dist.mode is not Mode.CIRCLE2D:
        raise InvalidArgument("sweeps need a circle distribution")
    order, pos, lab, w = dist.sorted_view
    c = np.asarray(counts)[order]
    n = int(np.asarray(counts).sum())
    fits = (dist.grid < _INT64_SAFE and dist.mass_den < _INT64_SAFE and n < _INT64_SAFE
            and pos.dtype != object and w.dtype != object)
    if fits:
        starts, err_d, err_s = kernels.arc_profile(
            dist.grid, np.ascontiguousarray(pos, dtype=np.int64), np.ascontiguousarray(lab),
            np.ascontiguousarray(w, dtype=np.int64), np.ascontiguousarray(c, dtype=np.int64))
    else:
        as_obj = lambda a: np.array([int(v) for v in a], dtype=object)
        starts, err_d, err_s = _kernels_py.arc_profile(dist.grid, as_obj(pos), lab, as_obj(w), as_obj(c))
    return ArcProfile(dist.grid, starts, err_d, err_s, dist.mass_den, n)


def _check_realizable(dist: LabeledDist, target: Semicircle):
    wrong = (grid_classify(dist.loc, dist.grid, target) != dist.lab) & (dist.weights > 0)
    if wrong.any():
        raise InvalidInput("distribution is not realizable by the target")


def _aligned_counts(sample: Sample, dist: LabeledDist):
    if sample.dist is not dist and len(sample.counts) != dist.m:
        raise InvalidInput("sample does not belong to this distribution")
    return sample.counts


def worst_consistent_error(sample: Sample, dist: LabeledDist, target: Semicircle):
    """Largest true error over the version space, with the maximizing shift arcs.

    Returns ``(value, arcs)``; each arc ``(a, b)`` means every shift in ``[a, b)``
    is consistent and attains ``value``.
    """
    if dist.mode is not Mode.CIRCLE2D:
        raise InvalidInput("worst_consistent_error needs a circle distribution")
    _check_realizable(dist, target)
    prof = arc_profile(dist, _aligned_counts(sample, dist))
    consistent = prof.err_s == 0
    best = int(prof.err_d[consistent].max())
    hits = np.flatnonzero(consistent & (prof.err_d == best))
    return Fraction(best, dist.mass_den), [prof.arc(g) for g in hits]


@dataclass(frozen=True)
class DeviationReport:
    max_dev: Fraction
    argmax_arc: tuple
    er_d_at_max: Fraction
    er_s_at_max: Fraction
    band: Optional[int] = None
    arcs: list = field(default_factory=list, repr=False)

    def to_json(self):
        rat = lambda x: {"num": x.numerator, "den": x.denominator, "float": float(x)}
        return {
            "max_dev": rat(self.max_dev),
            "argmax_arc": [a.to_json() for a in self.argmax_arc],
            "er_D_at_max": rat(self.er_d_at_max),
            "er_S_at_max": rat(self.er_s_at_max),
            "band": self.band,
            "n_arcs": len(self.arcs),
        }


def deviation_from_profile(prof: ArcProfile, band: Optional[int] = None) -> DeviationReport:
    keys = prof.deviation_keys()
    if band is not None:
        mask = prof.band_mask(band)
        if not mask.any():
            raise EmptyBand(f"no hypothesis has true error in (2^-{band}, 2^-{band - 1}]")
    else:
        mask = np.ones(len(prof), dtype=bool)
    best = max(keys[mask].tolist())
    hits = np.flatnonzero(mask & (keys == best))
    g = int(hits[0])
    return DeviationReport(
        max_dev=Fraction(int(best), prof.mass_den * prof.n),
        argmax_arc=prof.arc(g),
        er_d_at_max=prof.er_d(g),
        er_s_at_max=prof.er_s(g),
        band=band,
        arcs=[prof.arc(h) for h in hits],
    )


def sup_deviation(sample: Sample, dist: LabeledDist, band: Optional[int] = None) -> DeviationReport:
    """Exact ``sup_alpha er_D(h_alpha) - er_S(h_alpha)``, optionally within one dyadic band."""
    if dist.mode is not Mode.CIRCLE2D:
        raise InvalidInput("sup_deviation needs a circle distribution")
    counts = _aligned_counts(sample, dist)
    if int(counts.sum()) < 1:
        raise InvalidArgument("sup_deviation needs at least one draw")
    return deviation_from_profile(arc_profile(dist, counts), band)


# ----- critical wedges --------------------------------------------------------

@dataclass(frozen=True)
class CriticalRadii:
    """Smallest wedge radii reaching mass ``epsilon`` on each side of the reference.

    ``t_plus`` is attained: ``mu(G_{t_plus}) >= epsilon``. On the other side
    membership is strict in ``t``, so ``t_minus`` is an infimum that need not be
    attained.
    """

    t_plus: Optional[Angle]
    t_minus: Optional[Angle]
    epsilon: Fraction
    g_mass: Optional[Fraction] = None
    g_open_mass: Optional[Fraction] = None
    h_open_mass: Optional[Fraction] = None


def _relative_positions(dist: LabeledDist, reference: Semicircle):
    grid = math.lcm(dist.grid, reference.alpha.den)
    f = grid // dist.grid
    a = reference.alpha.num * (grid // reference.alpha.den)
    u = np.array([(int(p) * f - a) % grid for p in dist.loc], dtype=object)
    return u, grid


def wedge_coordinates(dist: LabeledDist, reference: Semicircle):
    """Per-atom radii at which each atom enters the G and H wedges of ``reference``.

    Atom ``q`` lies in ``G_t`` iff ``g[q] <= t`` and in ``H_t`` iff ``h[q] < t``;
    both are grid numerators over the returned grid.
    """
    if reference.closure is not Closure.LEFT_OPEN_RIGHT_CLOSED:
        raise InvalidArgument("wedge localization is defined for (alpha, alpha+1/2] references")
    u, grid = _relative_positions(dist, reference)
    half = grid // 2
    g = u % half
    g[g == 0] = half
    h = (-u) % half
    return g, h, grid


def _first_reaching(coord, weights, need):
    order = sorted(range(len(coord)), key=lambda q: coord[q])
    acc = 0
    for q in order:
        acc += int(weights[q])
        if acc >= need:
            return coord[q]
    return None


def critical_radii(dist: LabeledDist, eps, reference: Optional[Semicircle] = None) -> CriticalRadii:
    eps = Fraction(eps)
    if eps <= 0 or eps > 1:
        raise InvalidArgument("epsilon must lie in (0, 1]")
    reference = reference or Semicircle(Angle(0, 1))
    g, h, grid = wedge_coordinates(dist, reference)
    M = dist.mass_den
    need = math.ceil(eps * M)
    tg = _first_reaching(g, dist.weights, need)
    th = _first_reaching(h, dist.weights, need)
    w = [int(x) for x in dist.weights]
    mass = lambda sel: Fraction(sum(wq for wq, s in zip(w, sel) if s), M)
    return CriticalRadii(
        t_plus=None if tg is None else Angle(tg, grid),
        t_minus=None if th is None else Angle(th, grid),
        epsilon=eps,
        g_mass=None if tg is None else mass([x <= tg for x in g]),
        g_open_mass=None if tg is None else mass([x < tg for x in g]),
        h_open_mass=None if th is None else mass([0 < x < th for x in h]),
    )


# ----- version space closed form ---------------------------------------------

class VersionSpaceIndex:
    """Worst consistent error from sample positions alone.

    With the target at shift 0, the consistent shifts form ``[-a, b)`` where
    ``b`` is the smallest G-coordinate and ``a`` the smallest H-coordinate among
    sampled atoms. True error grows monotonically with the distance from the
    target, so the worst consistent error is the larger of the masses strictly
    inside the G wedge of radius ``b`` and the H wedge of radius ``a``.
    """

    def __init__(self, dist: LabeledDist, target: Semicircle):
        _check_realizable(dist, target)
        g, h, grid = wedge_coordinates(dist, target)
        self.half = grid // 2
        self.g = g
        self.h = h
        self.mass_den = dist.mass_den
        self._g_sorted, self._g_cum = self._prefix(g, dist.weights)
        self._h_sorted, self._h_cum = self._prefix(h, dist.weights)

    @staticmethod
    def _prefix(coord, weights):
        order = sorted(range(len(coord)), key=lambda q: coord[q])
        keys = [coord[q] for q in order]
        cum = [0]
        for q in order:
            cum.append(cum[-1] + int(weights[q]))
        return keys, cum

    def worst(self, counts) -> Fraction:
        from bisect import bisect_left
        seen = np.flatnonzero(np.asarray(counts) > 0)
        b = min((self.g[q] for q in seen), default=self.half)
        a = min((self.h[q] for q in seen), default=self.half)
        mg = self._g_cum[bisect_left(self._g_sorted, b)]
        mh = self._h_cum[bisect_left(self._h_sorted, a)]
        return Fraction(max(mg, mh), self.mass_den)


def _multiples_open(x, y, s):
    """Number of multiples of ``s`` in the open interval ``(x, y)``."""
    return np.maximum((y - 1) // s - x // s, 0)


def _multiples_half_open(x, y, s):
    """Number of multiples of ``s`` in ``(x, y]``."""
    return np.maximum(y // s - x // s, 0)


def uniform_grid_worst_error(m: int, grid: int, target: int, draws) -> Fraction:
    """Worst consistent error for ``m`` uniform atoms, target ``(T, T+1/2]`` with ``T = target/grid``.

    ``draws`` are sampled atom indices; runs in O(len(draws)) without touching
    the ``m`` atoms.
    """
    s = grid // m
    half = grid // 2
    draws = np.asarray(draws, dtype=np.int64)
    if len(draws):
        u = (draws * s - target) % grid
        g = u % half
        g[g == 0] = half
        b = int(g.min())
        a = int(((-u) % half).min())
    else:
        a = b = half
    cg = int(_multiples_open(target, target + b, s)) + int(_multiples_open(target + half, target + half + b, s))
    ch = int(_multiples_half_open(target + half - a, target + half, s)) + \
        int(_multiples_half_open(target + grid - a, target + grid, s))
    return Fraction(max(cg, ch), m)
