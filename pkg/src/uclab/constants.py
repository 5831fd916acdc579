"""Named constants used by bound formulas and success predicates.

Values fixed by the proofs are exact; constants the proofs leave unspecified
get working defaults that experiments may override with ``--const name=value``.
"""
from dataclasses import dataclass, fields, replace
from fractions import Fraction


@dataclass(frozen=True)
class Constants:
    # first-order VC bound
    thm1_c: Fraction = Fraction(1)
    # realizable homogeneous upper bound ln(thm4_two / delta) / n
    thm4_two: Fraction = Fraction(2)
    # bandwise log-free bound and the 2^-i -> er_S case split
    band_C: Fraction = Fraction(1)
    band_split_c: Fraction = Fraction(16)
    corollary_c: Fraction = Fraction(1)
    # realizable inhomogeneous lower bound: k = ceil(thm2_k_num n / (d ln(n/d)))
    thm2_k_num: Fraction = Fraction(8)
    thm2_den: Fraction = Fraction(144)
    thm2_block_frac: Fraction = Fraction(1, 32)
    thm2_event_prob: Fraction = Fraction(1, 15)
    # agnostic inhomogeneous lower bound
    thm3_c1: Fraction = Fraction(1)
    thm3_c: Fraction = Fraction(1, 4)
    thm3_block_den: Fraction = Fraction(256)
    thm3_quantile_den: Fraction = Fraction(8)
    # dyadic lower bound
    thm7_c: Fraction = Fraction(1)
    thm7_c_prime: Fraction = Fraction(1, 4)
    thm7_c2: Fraction = Fraction(1, 100)
    thm7_B: Fraction = Fraction(4)
    # within-constants sandwich audit
    lemma8_c: Fraction = Fraction(1)
    # anti-concentration lemmas
    rc_nine: Fraction = Fraction(9)
    pz_den: Fraction = Fraction(8)

    def with_overrides(self, overrides):
        """Return a copy with ``{name: value}`` replaced; values parse as rationals."""
        known = {f.name for f in fields(self)}
        parsed = {}
        for name, value in dict(overrides).items():
            if name not in known:
                raise KeyError(f"unknown constant {name!r}")
            parsed[name] = Fraction(str(value)) if not isinstance(value, Fraction) else value
        return replace(self, **parsed)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT = Constants()
