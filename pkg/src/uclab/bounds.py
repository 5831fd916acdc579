"""Closed-form bound evaluators, a binomial tail engine, and exact lemma checkers."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .constants import DEFAULT, Constants
from .errors import InvalidArgument


def as_fraction(x) -> Fraction:
    """Rational from int/Fraction/str, or from a float via its shortest decimal repr."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


# ----- bound formulas ---------------------------------------------------------

class BoundKind(enum.Enum):
    Thm1FirstOrder = "thm1-first-order"
    Thm4Realizable = "thm4-realizable"
    Thm4Mean = "thm4-mean"
    BandLogFree = "band-log-free"
    BandInSample = "band-in-sample"
    DyadicCorollary = "dyadic-corollary"
    Thm3Target = "thm3-target"
    Thm7Target = "thm7-target"


# parameters each kind needs besides the constants ledger
BOUND_PARAMS = {
    BoundKind.Thm1FirstOrder: ("er_s", "d", "n", "delta"),
    BoundKind.Thm4Realizable: ("n", "delta"),
    BoundKind.Thm4Mean: ("n",),
    BoundKind.BandLogFree: ("i", "n", "delta"),
    BoundKind.BandInSample: ("er_s", "n", "delta"),
    BoundKind.DyadicCorollary: ("er_s", "n", "delta"),
    BoundKind.Thm3Target: ("er_s", "d", "n"),
    BoundKind.Thm7Target: ("er_s", "n"),
}


def _xlog_e_over(x: float) -> float:
    """``x ln(e/x)`` with the limit value 0 at ``x = 0``."""
    return 0.0 if x == 0 else x * (1.0 - math.log(x))


def bound_value(kind: BoundKind, params: dict, consts: Constants = DEFAULT) -> float:
    kind = BoundKind(kind)
    missing = [p for p in BOUND_PARAMS[kind] if p not in params]
    if missing:
        raise InvalidArgument(f"{kind.value} needs parameters {missing}")
    n = params["n"]
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if "delta" in BOUND_PARAMS[kind]:
        delta = float(params["delta"])
        if not 0 < delta < 1:
            raise InvalidArgument(f"delta must lie in (0, 1), got {delta}")
        log_inv = math.log(1 / delta)
    er_s = float(params.get("er_s", 0.0))
    if not 0 <= er_s <= 1:
        raise InvalidArgument(f"er_s must lie in [0, 1], got {er_s}")
    d = params.get("d")

    if kind is BoundKind.Thm1FirstOrder:
        c = float(consts.thm1_c)
        first = math.sqrt((d * _xlog_e_over(er_s) + er_s * log_inv) / n)
        return c * (first + (d * math.log(n / d) + log_inv) / n)
    if kind is BoundKind.Thm4Realizable:
        return math.log(float(consts.thm4_two) / delta) / n
    if kind is BoundKind.Thm4Mean:
        return 2 / (n + 1)
    if kind is BoundKind.BandLogFree:
        i = params["i"]
        if i < 1:
            raise InvalidArgument("band index must be >= 1")
        return float(consts.band_C) * (math.sqrt(2.0 ** -i * log_inv / n) + log_inv / n)
    if kind is BoundKind.BandInSample:
        return float(consts.band_C) * (math.sqrt(er_s * log_inv / n) + log_inv / n)
    if kind is BoundKind.DyadicCorollary:
        if n < 3:
            raise InvalidArgument("the ln ln n term needs n >= 3")
        L = log_inv + math.log(math.log(n))
        return float(consts.corollary_c) * (math.sqrt(er_s * L / n) + L / n)
    if kind is BoundKind.Thm3Target:
        return float(consts.thm3_c) * math.sqrt(d * _xlog_e_over(er_s) / n)
    if kind is BoundKind.Thm7Target:
        if n < 3:
            raise InvalidArgument("the ln ln n term needs n >= 3")
        return float(consts.thm7_c_prime) * math.sqrt(er_s * math.log(math.log(n)) / n)
    raise InvalidArgument(f"unknown bound kind {kind}")


# ----- binomial tails in floating point ----------------------------------------

@dataclass(frozen=True)
class BinomQuery:
    n: int
    p: Fraction
    threshold: int

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))
        if self.n < 0:
            raise InvalidArgument("n must be >= 0")
        if not 0 <= self.p <= 1:
            raise InvalidArgument(f"p must lie in [0, 1], got {self.p}")
        if not 0 <= self.threshold <= self.n:
            raise InvalidArgument(f"threshold must lie in [0, n], got {self.threshold}")


class Side(enum.Enum):
    LOWER = "lower"   # Pr(Z <= threshold)
    UPPER = "upper"   # Pr(Z >= threshold)


@dataclass(frozen=True)
class TailValue:
    value: float
    log_value: float


_LN_SQRT_2PI = 0.5 * math.log(2 * math.pi)


@lru_cache(maxsize=None)
def _stirlerr_table():
    with mpmath.workdps(40):
        return [float(mpmath.loggamma(x + 1) - (x + mpmath.mpf("0.5")) * mpmath.log(x) + x
                      - mpmath.log(mpmath.sqrt(2 * mpmath.pi))) if x else 0.0
                for x in range(16)]


def stirlerr(n: int) -> float:
    """``ln(n!) - ln(sqrt(2 pi n) (n/e)^n)``."""
    if n < 16:
        return _stirlerr_table()[n]
    nn = float(n) * n
    s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n


def bd0(x: float, m: float) -> float:
    """Deviance term ``x ln(x/m) + m - x`` without cancellation near ``x = m``."""
    if abs(x - m) < 0.1 * (x + m):
        v = (x - m) / (x + m)
        s = (x - m) * v
        ej = 2 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / m) + m - x


def log_pmf(x: int, n: int, p: float) -> float:
    q = 1.0 - p
    if p == 0:
        return 0.0 if x == 0 else -math.inf
    if q == 0:
        return 0.0 if x == n else -math.inf
    if x == 0:
        return n * math.log1p(-p)
    if x == n:
        return n * math.log(p)
    lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q)
    return lc + 0.5 * math.log(n / (x * (n - x))) - _LN_SQRT_2PI


def _log_range_sum(n: int, p: float, lo: int, hi: int) -> float:
    """``ln sum_{j=lo..hi} pmf(j)``, anchored at the term nearest the mode."""
    q = 1.0 - p
    mode = min(int((n + 1) * p), n)
    a = min(max(mode, lo), hi)
    s = 1.0
    term = 1.0
    for j in range(a, hi):
        term *= (n - j) / (j + 1) * p / q
        s += term
        if term < 1e-18 * s:
            break
    term = 1.0
    for j in range(a, lo, -1):
        term *= j / (n - j + 1) * q / p
        s += term
        if term < 1e-18 * s:
            break
    return log_pmf(a, n, p) + math.log(s)


def binom_tail(q: BinomQuery, side: Side = Side.LOWER) -> TailValue:
    side = Side(side)
    n, x = q.n, q.threshold
    lo, hi = (0, x) if side is Side.LOWER else (x, n)
    p = float(q.p)
    if p == 0 or p == 1:
        atom = 0 if p == 0 else n
        v = 1.0 if lo <= atom <= hi else 0.0
        return TailValue(v, 0.0 if v else -math.inf)
    lv = min(_log_range_sum(n, p, lo, hi), 0.0)
    return TailValue(math.exp(lv), lv)


# ----- exact binomial sums ------------------------------------------------------

def exact_lower_tail(n: int, p, x: int) -> Fraction:
    """Exact ``Pr(Bin(n, p) <= x)`` for rational ``p``."""
    p = as_fraction(p)
    if x < 0:
        return Fraction(0)
    if x >= n:
        return Fraction(1)
    a, b = p.numerator, p.denominator
    c = b - a
    if a == 0:
        return Fraction(1)
    if c == 0:
        return Fraction(0)
    # term_j = C(n, j) a^j c^(n-j), exact integer recurrence
    term = c ** n
    total = term
    for j in range(x):
        term = term * (n - j) * a // ((j + 1) * c)
        total += term
    return Fraction(total, b ** n)


def exact_upper_tail(n: int, p, x: int) -> Fraction:
    """Exact ``Pr(Bin(n, p) >= x)``."""
    return 1 - exact_lower_tail(n, p, x - 1)


# ----- lemma checkers -------------------------------------------------------------

def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


@dataclass(frozen=True)
class ReverseChernoffResult:
    holds: bool
    lhs: Fraction
    rhs: float
    valid: bool
    threshold: int


def reverse_chernoff_check(n: int, p, delta) -> ReverseChernoffResult:
    """Exact ``Pr(Bin(n,p) <= (1-delta) n p)`` against ``exp(-9 n p delta^2)``."""
    p = as_fraction(p)
    dl = Fraction(delta)  # exact binary value of a float delta
    np_ = n * p
    thr = math.floor((1 - dl) * np_)
    lhs = exact_lower_tail(n, p, thr)
    with mpmath.workdps(50):
        rhs_mp = mpmath.exp(-9 * _mpf(np_) * _mpf(dl) ** 2)
        holds = _mpf(lhs) >= rhs_mp
        rhs = float(rhs_mp)
    valid = dl * dl * np_ > 3 and dl < Fraction(1, 2)
    return ReverseChernoffResult(bool(holds), lhs, rhs, bool(valid), thr)


@dataclass(frozen=True)
class PaleyZygmundResult:
    holds: bool
    lhs: Fraction
    rhs: Fraction
    threshold: int


def paley_zygmund_check(n: int, p, consts: Constants = DEFAULT) -> PaleyZygmundResult:
    """Exact ``Pr(Y >= mu/2)`` for ``Y ~ Bin(n, p)`` against ``min(1, mu)/8``."""
    p = as_fraction(p)
    mu = n * p
    thr = math.ceil(mu / 2)
    lhs = exact_upper_tail(n, p, thr)
    rhs = min(Fraction(1), mu) / consts.pz_den
    return PaleyZygmundResult(lhs >= rhs, lhs, rhs, thr)


def delta_schedule(m: int, delta):
    """Per-band confidences ``delta/(i(i+1))`` for ``i = 1..m`` and the remainder ``delta/(m+1)``."""
    if m < 1:
        raise InvalidArgument(f"m must be >= 1, got {m}")
    dl = as_fraction(delta)
    if not 0 < dl < 1:
        raise InvalidArgument(f"delta must lie in (0, 1), got {delta}")
    return [dl / (i * (i + 1)) for i in range(1, m + 1)], dl / (m + 1)
