"""Lower-bound constructions as seeded trials.

Each ``*_trial`` is a pure function of its parameters and seed. Wherever a
construction allows an arbitrary choice we take the lowest block index and
then the lowest point index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np

from .bounds import BoundKind, as_fraction, bound_value
from .constants import DEFAULT, Constants
from .distributions import (LabeledDist, Sample, empirical_error, sample_n, true_error,
                            uniform_circle, uniform_structured)
from .errors import ConstructionInfeasible, InvalidArgument
from .geometry import (Angle, BlockLabeling, Closure, Semicircle, StructuredSupport,
                       build_support, realize_labeling)
from .oracles2d import arc_profile


def rational_json(x: Fraction):
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "float": float(x)}


@dataclass
class TrialOutcome:
    seed: int
    n: int
    tag: str
    consistent: bool
    er_d: Fraction
    er_s: Fraction
    witness: Optional[dict]
    success: bool
    band: Optional[int] = None
    d: Optional[int] = None
    extras: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    @property
    def deviation(self) -> Fraction:
        return self.er_d - self.er_s

    def to_json(self):
        extras = {}
        for key, v in self.extras.items():
            if isinstance(v, Fraction):
                extras[key] = rational_json(v)
            elif isinstance(v, (bool, np.bool_)):
                extras[key] = bool(v)
            elif isinstance(v, (int, np.integer)):
                extras[key] = int(v)
            else:
                extras[key] = float(v)
        return {
            "seed": self.seed,
            "n": self.n,
            "d": self.d,
            "tag": self.tag,
            "consistent": bool(self.consistent),
            "er_D": rational_json(self.er_d),
            "er_S": rational_json(self.er_s),
            "deviation": rational_json(self.deviation),
            "witness": self.witness,
            "success": bool(self.success),
            "band": self.band,
            "extras": extras,
            "flags": list(self.flags),
        }


# ----- realizable inhomogeneous lower bound ---------------------------------------

def thm2_params(n: int, d: int, consts: Constants = DEFAULT) -> int:
    """``k = ceil(8 n / (d ln(n/d)))``, the ceiling decided in 60-digit arithmetic."""
    if d < 2 or d % 2:
        raise InvalidArgument(f"d must be even and >= 2, got {d}")
    if n <= d:
        raise InvalidArgument(f"need n > d, got n={n}, d={d}")
    num = consts.thm2_k_num
    with mpmath.workdps(60):
        x = mpmath.mpf(num.numerator) * n / (num.denominator * d * mpmath.log(mpmath.mpf(n) / d))
        k = int(mpmath.ceil(x))
        if not (k - 1 < x <= k):
            raise ArithmeticError("ceiling check failed")
    return k


def _blocks(sample: Sample, sup: StructuredSupport) -> np.ndarray:
    return np.asarray(sample.counts).reshape(sup.blocks, sup.k)


def _realized_errors(dist: LabeledDist, sample: Sample, h, chosen, sup):
    """Exact errors of ``h_y``: count-based, cross-checked against classification."""
    m = len(sup)
    er_d = Fraction(len(chosen), m)
    er_s = Fraction(sum(int(sample.counts[q]) for q in chosen), sample.n)
    if true_error(dist, h) != er_d or empirical_error(sample, h) != er_s:
        raise AssertionError("realized halfspace disagrees with its labeling")
    return er_d, er_s


def thm2_trial(n: int, d: int, seed: int, k: Optional[int] = None,
               consts: Constants = DEFAULT) -> TrialOutcome:
    k = k if k is not None else thm2_params(n, d, consts)
    sup = build_support(d, k)
    dist = uniform_structured(sup)
    sample = sample_n(dist, n, seed)
    counts = _blocks(sample, sup)
    neg = []
    for i in range(sup.blocks):
        missing = np.flatnonzero(counts[i] == 0)
        neg.append(int(missing[0]) if len(missing) else None)
    y = BlockLabeling(tuple(neg))
    h = realize_labeling(sup, y)
    chosen = [sup.index(i, j) for i, j in y.negatives]
    er_d, er_s = _realized_errors(dist, sample, h, chosen, sup)
    consistent = er_s == 0
    thr = d * math.log(n / d) / (float(consts.thm2_den) * n) if n > d else 0.0
    full = all(j is not None for j in neg)
    return TrialOutcome(
        seed=seed, n=n, d=d, tag="inhom-realizable", consistent=consistent,
        er_d=er_d, er_s=er_s, witness=h.to_json(),
        success=bool(consistent and er_d > 0 and float(er_d) >= thr),
        extras={"k": k, "blocks_with_missing": len(chosen), "all_blocks_missing": full,
                "threshold": thr},
        flags=[] if chosen else ["no-missing-point"],
    )


# ----- agnostic inhomogeneous lower bound ------------------------------------------

def thm3_k(d: int, tau, consts: Constants = DEFAULT):
    """Integer block size nearest ``2 ceil(d/256) / (tau d)`` and the matching exact ``tau``."""
    tau = as_fraction(tau)
    if tau <= 0:
        raise InvalidArgument("tau must be positive")
    neg = math.ceil(Fraction(d) / consts.thm3_block_den)
    k_real = Fraction(2 * neg) / (tau * d)
    k = max(1, math.floor(k_real + Fraction(1, 2)))
    return k, Fraction(2 * neg, k * d), neg


@lru_cache(maxsize=256)
def _deficit_cut(n: int, p: Fraction, inv_level: int):
    """Smallest ``x`` with ``Pr(Bin(n, p) <= x) >= 1/inv_level``, exact; None if above ``n``."""
    a, b = p.numerator, p.denominator
    c = b - a
    bn = b ** n
    term = c ** n
    total = term
    x = 0
    while total * inv_level < bn:
        if x >= n:
            return None
        term = term * (n - x) * a // ((x + 1) * c)
        total += term
        x += 1
    return x


def thm3_params(n: int, d: int, tau, consts: Constants = DEFAULT):
    """``(k, t, tau_adj)`` for the agnostic construction.

    ``t`` is the largest integer with ``Pr(Z <= 2n/(dk) - t) >= 1/(8k)`` for
    ``Z ~ Bin(n, 2/(dk))``, found by an exact integer scan of the lower tail.
    """
    tau = as_fraction(tau)
    if d < 2 or d % 2:
        raise InvalidArgument(f"d must be even and >= 2, got {d}")
    if n <= d:
        raise InvalidArgument(f"need n > d, got n={n}, d={d}")
    c1 = float(consts.thm3_c1)
    lo = c1 * d * math.log(n / d) / n
    if not (lo <= float(tau) <= 1 / c1):
        raise InvalidArgument(f"tau={tau} outside [{lo:.6g}, {1 / c1:.6g}]")
    k, tau_adj, _ = thm3_k(d, tau, consts)
    if k < 2:
        raise ConstructionInfeasible(f"block size k={k} < 2 (tau too large for d={d})")
    mean = Fraction(2 * n, d * k)
    inv_level = int(consts.thm3_quantile_den) * k
    x = _deficit_cut(n, Fraction(2, d * k), inv_level)
    t = None if x is None else math.floor(mean - x)
    if t is None or t < 1:
        raise ConstructionInfeasible(f"no positive deficit t for n={n}, d={d}, k={k}")
    return k, t, tau_adj


def thm3_trial(n: int, d: int, tau, seed: int, consts: Constants = DEFAULT) -> TrialOutcome:
    k, t, tau_adj = thm3_params(n, d, tau, consts)
    sup = build_support(d, k)
    dist = uniform_structured(sup)
    sample = sample_n(dist, n, seed)
    counts = _blocks(sample, sup)
    cap = math.floor(Fraction(2 * n, d * k) - t)
    need = math.ceil(Fraction(d) / consts.thm3_block_den)
    pairs = []
    for i in range(sup.blocks):
        low = np.flatnonzero(counts[i] <= cap)
        if len(low):
            pairs.append((i, int(low[0])))
    extras = {"k": k, "t": t, "tau_adj": tau_adj, "cap": cap, "qualifying_blocks": len(pairs)}
    if len(pairs) < need:
        return TrialOutcome(seed=seed, n=n, d=d, tag="agnostic-lb", consistent=False,
                            er_d=Fraction(0), er_s=Fraction(0), witness=None, success=False,
                            extras=extras, flags=["not-enough-deficit-blocks"])
    y = BlockLabeling.from_negatives(sup.blocks, pairs[:need])
    h = realize_labeling(sup, y)
    chosen = [sup.index(i, j) for i, j in y.negatives]
    er_d, er_s = _realized_errors(dist, sample, h, chosen, sup)
    dev = er_d - er_s
    target = bound_value(BoundKind.Thm3Target, {"er_s": er_s, "d": d, "n": n}, consts)
    extras.update({
        "target": target,
        "sandwich": tau_adj / 2 <= er_s <= 2 * tau_adj,
        "er_s_cap": Fraction(need * cap, n),
    })
    return TrialOutcome(seed=seed, n=n, d=d, tag="agnostic-lb", consistent=er_s == 0,
                        er_d=er_d, er_s=er_s, witness=h.to_json(),
                        success=float(dev) >= target, extras=extras)


# ----- dyadic lower bound for homogeneous halfplanes ------------------------------

@dataclass(frozen=True)
class DyadicConstruction:
    n: int
    k: int
    B: int
    m: int
    c2: Fraction
    dist: LabeledDist = field(repr=False)

    @property
    def bands(self):
        return range(1, self.m + 1)

    def C(self, i: int) -> np.ndarray:
        r = np.arange(self.B ** i, dtype=np.int64)
        return np.concatenate([r, r + self.k // 2])

    def D(self, i: int) -> np.ndarray:
        lo = self.B ** (i - 1) if i > 1 else 0
        r = np.arange(lo, self.B ** i, dtype=np.int64)
        return np.concatenate([r, r + self.k // 2])

    def h(self, i: int) -> Semicircle:
        return Semicircle(Angle(self.B ** i, self.k), Closure.LEFT_CLOSED_RIGHT_OPEN)

    def mu(self, i: int) -> Fraction:
        return Fraction(self.n * len(self.D(i)), self.k)

    @property
    def log_term(self) -> float:
        """``ln(log_B k)``."""
        return math.log(math.log(self.k) / math.log(self.B))


def _is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def thm7_construct(n: int, B: int = 4, c2=Fraction(1, 100)) -> DyadicConstruction:
    if not _is_pow2(B) or B < 4:
        raise InvalidArgument(f"B must be a power of 2 and >= 4, got {B}")
    if n < 16:
        raise InvalidArgument(f"need n >= 16, got {n}")
    c2 = as_fraction(c2)
    with mpmath.workdps(50):
        need = mpmath.mpf(c2.numerator) * n / (c2.denominator * mpmath.log(mpmath.log(n)))
        m = 1
        while 2 * B ** m < need:
            m += 1
    k = 2 * B ** m
    target = Semicircle(Angle(0, 1), Closure.LEFT_CLOSED_RIGHT_OPEN)
    return DyadicConstruction(n=n, k=k, B=B, m=m, c2=c2, dist=uniform_circle(k, target))


def thm7_trial(n: int, seed: int, cons: DyadicConstruction, consts: Constants = DEFAULT) -> TrialOutcome:
    if cons.m < 1:
        raise InvalidArgument("construction has no bands")
    sample = sample_n(cons.dist, n, seed)
    counts = np.asarray(sample.counts)
    L = cons.log_term
    c = float(consts.thm7_c)
    in_d = [int(counts[cons.D(i)].sum()) for i in cons.bands]
    mus = [cons.mu(i) for i in cons.bands]
    fired = [s < float(mu) - c * math.sqrt(float(mu) * L) for s, mu in zip(in_d, mus)]
    capped = all(s <= 2 * mu for s, mu in zip(in_d, mus))
    extras = {"k": cons.k, "B": cons.B, "bands": cons.m, "all_capped": capped}
    if not any(fired):
        return TrialOutcome(seed=seed, n=n, tag="dyadic-lb", consistent=False, er_d=Fraction(0),
                            er_s=Fraction(0), witness=None, success=False, extras=extras,
                            flags=["no-deficit"])
    i = fired.index(True) + 1
    in_c = sum(in_d[:i])
    er_d = Fraction(2 * cons.B ** i, cons.k)
    er_s = Fraction(in_c, n)
    mu_i = float(mus[i - 1])
    margin = (c / 2) * math.sqrt(mu_i * L) / n
    # largest upward excess among earlier bands, in units of sqrt(mu_j L)
    c1_obs = max([(s - float(mu)) / math.sqrt(float(mu) * L) for s, mu in zip(in_d[:i - 1], mus[:i - 1])],
                 default=0.0)
    premise = max(c1_obs, 0.0) * sum(math.sqrt(float(mu)) for mu in mus[:i - 1]) <= (c / 2) * math.sqrt(mu_i)
    target = bound_value(BoundKind.Thm7Target, {"er_s": er_s, "n": n}, consts)
    extras.update({
        "mu_i": mus[i - 1],
        "S_cap_C_i": in_c,
        "S_cap_D_i": in_d[i - 1],
        "margin": margin,
        "accounting": float(er_d - er_s) >= margin,
        "c1_observed": c1_obs,
        "chain_premise": premise,
        "target": target,
    })
    return TrialOutcome(seed=seed, n=n, tag="dyadic-lb", consistent=er_s == 0, er_d=er_d, er_s=er_s,
                        witness=cons.h(i).to_json(), band=i,
                        success=float(er_d - er_s) >= target, extras=extras)


def thm7_band_counts(sample: Sample, cons: DyadicConstruction):
    """``(|S cap D_i|, |S cap C_i|)`` for every band."""
    counts = np.asarray(sample.counts)
    d = [int(counts[cons.D(i)].sum()) for i in cons.bands]
    c = [int(counts[cons.C(i)].sum()) for i in cons.bands]
    return d, c


# ----- within-constants audit -----------------------------------------------------

@dataclass(frozen=True)
class SandwichViolation:
    arc: tuple
    er_d: Fraction
    er_s: Fraction


def lemma8_audit(sample: Sample, dist: LabeledDist, d_eff: int, delta, c) -> list:
    """Arcs of shifts above the error threshold where ``er_S/2 <= er_D <= 2 er_S`` fails."""
    n = sample.n
    if n < 1:
        return []
    prof = arc_profile(dist, sample.counts)
    dl, c = float(delta), float(as_fraction(c))
    thr = c * (math.log(1 / dl) + d_eff * math.log(n / d_eff)) / n
    out = []
    for g in range(len(prof)):
        ed, es = prof.er_d(g), prof.er_s(g)
        if float(ed) >= thr and not (es / 2 <= ed <= 2 * es):
            out.append(SandwichViolation(prof.arc(g), ed, es))
    return out
