"""Seeded parallel experiment runner, aggregation, and rate fits."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import stats

from . import kernels
from .adversary import (TrialOutcome, rational_json, thm2_params, thm2_trial, thm3_params,
                        thm3_trial, thm7_construct, thm7_trial)
from .bounds import BoundKind, as_fraction, bound_value
from .constants import DEFAULT, Constants
from .distributions import sample_n, uniform_circle
from .errors import ConfigError, ConstructionInfeasible, EmptyBand, InvalidArgument
from .geometry import Angle, Semicircle
from .oracles2d import arc_profile, deviation_from_profile, uniform_grid_worst_error
from .rng import aux_below, derive_seed

EXPERIMENTS = ("homog-realizable", "inhom-realizable", "agnostic-lb", "bandwise", "dyadic-lb",
               "verify-lemmas", "bounds")
Z95 = 1.959964


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: tuple = (100,)
    d: int = 2
    tau: Optional[Fraction] = None
    band: Optional[int] = None
    bands: tuple = (4, 5, 6, 7, 8, 9)
    B: int = 4
    c2: Fraction = Fraction(1, 100)
    atoms: Optional[int] = None   # log2 of the circle grid size
    delta: float = 0.05
    trials: int = 100
    seed: int = 0
    workers: int = 1
    consts: Constants = DEFAULT

    def __post_init__(self):
        n = (self.n,) if isinstance(self.n, int) else tuple(int(v) for v in self.n)
        object.__setattr__(self, "n", n)
        if self.tau is not None:
            object.__setattr__(self, "tau", as_fraction(self.tau))
        object.__setattr__(self, "c2", as_fraction(self.c2))

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.n or any(b <= a for a, b in zip(self.n, self.n[1:])):
            raise ConfigError("n-grid must be nonempty and strictly increasing")
        if any(v < 1 for v in self.n):
            raise ConfigError("n must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        exp = self.experiment
        try:
            if exp == "inhom-realizable":
                for n in self.n:
                    thm2_params(n, self.d, self.consts)
            elif exp == "agnostic-lb":
                if self.tau is None:
                    raise ConfigError("agnostic-lb needs --tau")
                for n in self.n:
                    thm3_params(n, self.d, self.tau, self.consts)
            elif exp == "dyadic-lb":
                for n in self.n:
                    thm7_construct(n, self.B, self.c2)
            elif exp == "bandwise":
                if any(i < 1 for i in self.band_list):
                    raise ConfigError("band indices must be >= 1")
        except InvalidArgument as e:
            raise ConfigError(str(e)) from e

    @property
    def band_list(self):
        return (self.band,) if self.band is not None else tuple(self.bands)

    @property
    def log2_atoms(self) -> int:
        if self.atoms is not None:
            return self.atoms
        return 12 if self.experiment == "bandwise" else 16

    def to_json(self):
        return {
            "experiment": self.experiment, "n": list(self.n), "d": self.d,
            "tau": None if self.tau is None else rational_json(self.tau),
            "band": self.band, "bands": list(self.bands), "B": self.B, "c2": rational_json(self.c2),
            "atoms": self.log2_atoms, "delta": self.delta, "trials": self.trials, "seed": self.seed,
            "consts": {k: rational_json(v) for k, v in self.consts.as_dict().items()},
        }


# ----- per-trial experiment bodies ----------------------------------------------------

def homog_trial(n: int, log2_atoms: int, seed: int, delta: float, consts: Constants = DEFAULT) -> TrialOutcome:
    """Worst consistent error on a uniform grid with a uniformly random target shift."""
    m = 1 << log2_atoms
    grid = 2 * m
    target = aux_below(seed, 0, grid)
    draws = kernels.draw_uniform(seed, n, m)
    worst = uniform_grid_worst_error(m, grid, target, draws)
    bound = bound_value(BoundKind.Thm4Realizable, {"n": n, "delta": delta}, consts)
    return TrialOutcome(seed=seed, n=n, d=2, tag="homog-realizable", consistent=True, er_d=worst,
                        er_s=Fraction(0), witness=Semicircle(Angle(target, grid)).to_json(),
                        success=float(worst) <= bound, extras={"bound": bound, "atoms": m})


def bandwise_trials(n: int, log2_atoms: int, bands, seed: int, delta: float,
                    consts: Constants = DEFAULT) -> list:
    """Band-restricted sup deviations for one sample; one outcome per band."""
    m = 1 << log2_atoms
    grid = 2 * m
    target = Semicircle(Angle(aux_below(seed, 0, grid), grid))
    dist = uniform_circle(m, target, grid=grid)
    sample = sample_n(dist, n, seed)
    prof = arc_profile(dist, sample.counts)
    out = []
    for i in bands:
        try:
            rep = deviation_from_profile(prof, i)
        except EmptyBand:
            out.append(TrialOutcome(seed=seed, n=n, d=2, tag="bandwise", consistent=False,
                                    er_d=Fraction(0), er_s=Fraction(0), witness=None, success=False,
                                    band=i, flags=["empty-band"]))
            continue
        bound = bound_value(BoundKind.BandLogFree, {"i": i, "n": n, "delta": delta}, consts)
        out.append(TrialOutcome(
            seed=seed, n=n, d=2, tag="bandwise", consistent=rep.er_s_at_max == 0,
            er_d=rep.er_d_at_max, er_s=rep.er_s_at_max,
            witness={"arc": [a.to_json() for a in rep.argmax_arc]}, band=i,
            success=float(rep.max_dev) <= bound,
            extras={"scaled": float(rep.max_dev) / math.sqrt(2.0 ** -i / n), "bound": bound}))
    return out


@lru_cache(maxsize=16)
def _dyadic(n, B, c2):
    return thm7_construct(n, B, c2)


def _run_one(args):
    cfg, n, index = args
    seed = derive_seed(cfg.seed, index)
    exp = cfg.experiment
    if exp == "homog-realizable":
        return [homog_trial(n, cfg.log2_atoms, seed, cfg.delta, cfg.consts)]
    if exp == "inhom-realizable":
        return [thm2_trial(n, cfg.d, seed, consts=cfg.consts)]
    if exp == "agnostic-lb":
        return [thm3_trial(n, cfg.d, cfg.tau, seed, cfg.consts)]
    if exp == "bandwise":
        return bandwise_trials(n, cfg.log2_atoms, cfg.band_list, seed, cfg.delta, cfg.consts)
    if exp == "dyadic-lb":
        return [thm7_trial(n, seed, _dyadic(n, cfg.B, cfg.c2), cfg.consts)]
    raise ConfigError(f"{exp} is not a trial experiment")


def run_outcomes(cfg: ExperimentConfig) -> list:
    """All trial outcomes in (n, trial index, band) order."""
    cfg.validate()
    if cfg.experiment in ("verify-lemmas", "bounds"):
        raise ConfigError(f"{cfg.experiment} does not run trials")
    jobs = [(cfg, n, i) for n in cfg.n for i in range(cfg.trials)]
    if cfg.workers == 1:
        results = map(_run_one, jobs)
        return [o for batch in results for o in batch]
    chunk = max(1, len(jobs) // (cfg.workers * 8))
    with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
        return [o for batch in ex.map(_run_one, jobs, chunksize=chunk) for o in batch]


# ----- aggregation ----------------------------------------------------------------------

def wilson_interval(successes: int, trials: int, level: float = 0.95):
    if trials < 1 or not 0 <= successes <= trials:
        raise InvalidArgument(f"invalid counts {successes}/{trials}")
    z = Z95 if level == 0.95 else float(stats.norm.ppf(0.5 + level / 2))
    p = successes / trials
    den = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    # the exact interval always contains p; pin the endpoints rounding would nudge past it
    lo = 0.0 if successes == 0 else min(p, max(0.0, center - half))
    hi = 1.0 if successes == trials else max(p, min(1.0, center + half))
    return lo, hi


def nearest_rank(sorted_vals, q: Fraction):
    """Nearest-rank quantile: the ``ceil(q N)``-th smallest value."""
    N = len(sorted_vals)
    r = max(1, math.ceil(Fraction(q) * N))
    return sorted_vals[r - 1]


def _stats(values):
    vals = sorted(values)
    mean = sum(vals, Fraction(0)) / len(vals)
    return {"mean": rational_json(mean), "median": rational_json(nearest_rank(vals, Fraction(1, 2))),
            "p95": rational_json(nearest_rank(vals, Fraction(95, 100)))}


@dataclass
class Summary:
    trials: int
    successes: int
    rate: float
    ci: tuple
    er_d: dict
    er_s: dict
    deviation: dict
    per_group: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def to_json(self):
        return {"type": "summary", "trials": self.trials, "successes": self.successes,
                "rate": self.rate, "ci95": list(self.ci), "er_D": self.er_d, "er_S": self.er_s,
                "deviation": self.deviation, "groups": self.per_group, "flags": self.flags}


def _fold(outcomes):
    ok = sum(1 for o in outcomes if o.success)
    N = len(outcomes)
    flags = {}
    for o in outcomes:
        for f in o.flags:
            flags[f] = flags.get(f, 0) + 1
    return N, ok, flags


def summarize(outcomes) -> Summary:
    """Order-independent aggregate; outcomes are grouped by ``(n, band)``."""
    if not outcomes:
        raise InvalidArgument("no outcomes to summarize")
    outcomes = sorted(outcomes, key=lambda o: (o.n, o.band or 0, o.seed))
    N, ok, flags = _fold(outcomes)
    groups = {}
    for key in sorted({(o.n, o.band) for o in outcomes}, key=lambda t: (t[0], t[1] or 0)):
        sub = [o for o in outcomes if (o.n, o.band) == key]
        gN, gok, gflags = _fold(sub)
        lo, hi = wilson_interval(gok, gN)
        name = f"n={key[0]}" + (f",band={key[1]}" if key[1] is not None else "")
        groups[name] = {"trials": gN, "successes": gok, "rate": gok / gN, "ci95": [lo, hi],
                        "er_D": _stats([o.er_d for o in sub]), "deviation": _stats([o.deviation for o in sub]),
                        "flags": gflags}
    lo, hi = wilson_interval(ok, N)
    return Summary(N, ok, ok / N, (lo, hi), _stats([o.er_d for o in outcomes]),
                   _stats([o.er_s for o in outcomes]), _stats([o.deviation for o in outcomes]),
                   groups, flags)


def run_trials(cfg: ExperimentConfig):
    """Run the configured trials; returns ``(outcomes, summary)``."""
    outcomes = run_outcomes(cfg)
    return outcomes, summarize(outcomes)


# ----- rate fits ------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelComparison:
    a: float
    b: float
    rss_const: float
    rss_log: float
    slope_ci: tuple

    @property
    def log_growth(self) -> bool:
        return self.slope_ci[0] > 0

    @property
    def classification(self) -> str:
        return "log-growth" if self.log_growth else "no-log-growth"

    def to_json(self):
        return {"a": self.a, "b": self.b, "rss_const": self.rss_const, "rss_log": self.rss_log,
                "slope_ci95": list(self.slope_ci), "classification": self.classification}


def fit_rate(points) -> ModelComparison:
    """Least squares of ``y = n * measured`` on ``ln n``, with a t-based 95% slope interval."""
    pts = [(float(n), float(v)) for n, v in points]
    if len({n for n, _ in pts}) < 3:
        raise InvalidArgument("need at least 3 distinct n values")
    x = np.array([math.log(n) for n, _ in pts])
    y = np.array([n * v for n, v in pts])
    xc = x - x.mean()
    sxx = float(xc @ xc)
    a = float(xc @ (y - y.mean())) / sxx
    b = float(y.mean() - a * x.mean())
    resid = y - (a * x + b)
    rss_log = max(float(resid @ resid), 0.0)
    rss_const = float(((y - y.mean()) ** 2).sum())
    dof = len(pts) - 2
    se = math.sqrt(rss_log / dof / sxx) if dof > 0 else math.inf
    half = float(stats.t.ppf(0.975, dof)) * se if dof > 0 else math.inf
    return ModelComparison(a, b, rss_const, rss_log, (a - half, a + half))


# ----- output ------------------------------------------------------------------------------

CSV_COLUMNS = ("seed", "n", "d", "tag", "consistent", "er_D_num", "er_D_den", "er_S_num", "er_S_den",
               "dev_float", "band_i", "success")


def _json_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def render_jsonl(outcomes, summary: Summary) -> str:
    lines = [_json_line(o.to_json()) for o in outcomes]
    lines.append(_json_line(summary.to_json()))
    return "\n".join(lines) + "\n"


def render_csv(outcomes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for o in outcomes:
        w.writerow([o.seed, o.n, "" if o.d is None else o.d, o.tag, int(o.consistent),
                    o.er_d.numerator, o.er_d.denominator, o.er_s.numerator, o.er_s.denominator,
                    repr(float(o.deviation)), "" if o.band is None else o.band, int(o.success)])
    return buf.getvalue()


def write_outputs(outcomes, summary: Summary, path, fmt: str = "json"):
    """Write trial records; CSV output puts the summary in ``<path>.summary.json``."""
    if fmt == "json":
        with open(path, "w") as f:
            f.write(render_jsonl(outcomes, summary))
    elif fmt == "csv":
        with open(path, "w") as f:
            f.write(render_csv(outcomes))
        with open(f"{path}.summary.json", "w") as f:
            f.write(_json_line(summary.to_json()) + "\n")
    else:
        raise ConfigError(f"unknown format {fmt!r}")


# ----- lemma verification report ------------------------------------------------------------

def verify_lemmas(seed: int = 0, support_labelings: int = 1000) -> dict:
    """Exhaustive grids for the anti-concentration lemmas, the schedule, and the support lemma."""
    from .bounds import delta_schedule, paley_zygmund_check, reverse_chernoff_check
    from .geometry import (BlockLabeling, block_margins, build_support, labeling_margin,
                           realize_labeling, support_margin)

    rc_fail, rc_count = [], 0
    for n, p, dl in reverse_chernoff_grid():
        r = reverse_chernoff_check(n, p, dl)
        rc_count += 1
        if not (r.valid and r.holds):
            rc_fail.append({"n": n, "p": str(p), "delta": dl})
    pz_fail, pz_count = [], 0
    for n in range(1, 201):
        for j in range(21):
            pz_count += 1
            if not paley_zygmund_check(n, Fraction(j, 40)).holds:
                pz_fail.append({"n": n, "p": f"{j}/40"})
    sched_fail = []
    for m in range(1, 65):
        for dl in (Fraction(1, 2), Fraction(1, 10), Fraction(1, 100)):
            parts, rest = delta_schedule(m, dl)
            if sum(parts) + rest != dl:
                sched_fail.append({"m": m, "delta": str(dl)})
    sup_fail, sup_count = [], 0
    rng = np.random.Generator(np.random.Philox(seed))
    for d in (2, 4, 8):
        for k in range(2, 65):
            sup = build_support(d, k)
            for _ in range(support_labelings):
                neg = [int(j) if j < k else None for j in rng.integers(0, k + 1, size=sup.blocks)]
                y = BlockLabeling(tuple(neg))
                h = realize_labeling(sup, y)
                val = sup.coords @ h.w + h.b
                sup_count += 1
                wrong = (np.where(val >= 0, 1, -1) != y.labels(sup)).any()
                thin = (block_margins(sup, y, h) < support_margin(k) - 1e-9).any() or \
                    np.abs(val).min() < labeling_margin(k) - 1e-9
                if wrong or thin:
                    sup_fail.append({"d": d, "k": k, "neg": neg})
    return {
        "reverse_chernoff": {"checked": rc_count, "failures": rc_fail},
        "paley_zygmund": {"checked": pz_count, "failures": pz_fail},
        "delta_schedule": {"checked": 64 * 3, "failures": sched_fail},
        "support": {"checked": sup_count, "failures": sup_fail},
    }


def reverse_chernoff_grid():
    """``(n, p, delta)`` with ``n = 2^4..2^12``, four ``p`` values and eight evenly spaced valid ``delta``.

    Points where the validity window ``(sqrt(3/(np)), 1/2)`` is empty are skipped.
    """
    for e in range(4, 13):
        n = 1 << e
        for p in (Fraction(1, 64), Fraction(1, 16), Fraction(1, 4), Fraction(1, 2)):
            lo = math.sqrt(3 / float(n * p))
            if lo >= 0.5:
                continue
            for j in range(1, 9):
                yield n, p, lo + (0.5 - lo) * j / 9
