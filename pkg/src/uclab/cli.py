"""Command line entry point: ``uclab <experiment> [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bounds import BOUND_PARAMS, BoundKind, bound_value
from .constants import DEFAULT
from .errors import ConfigError, ConstructionInfeasible, InvalidArgument
from .harness import EXPERIMENTS, ExperimentConfig, run_trials, verify_lemmas, write_outputs

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 2, 3


def _n_grid(s: str):
    return tuple(int(v) for v in s.split(",") if v)


def _pair(s: str):
    name, sep, value = s.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {s!r}")
    return name.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uclab", description="Fine-grained uniform convergence experiments for halfspaces.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--n", type=_n_grid, default=(100,), help="sample size or comma-separated increasing grid")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--tau", type=Fraction, default=None, help="target error p/q (agnostic-lb)")
    p.add_argument("--band", type=int, default=None, help="single band index (bandwise)")
    p.add_argument("--bands", type=_n_grid, default=(4, 5, 6, 7, 8, 9))
    p.add_argument("--B", type=int, default=4)
    p.add_argument("--c2", type=Fraction, default=Fraction(1, 100))
    p.add_argument("--atoms", type=int, default=None, help="log2 of the circle grid size")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--const", type=_pair, action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--kind", default=None, help="bound kind (bounds)")
    p.add_argument("--param", type=_pair, action="append", default=[], metavar="NAME=VALUE",
                   help="bound parameter (bounds)")
    return p


def _emit(text: str, out):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _bounds(args, consts) -> int:
    try:
        kind = BoundKind(args.kind)
    except ValueError:
        raise ConfigError(f"--kind must be one of {[k.value for k in BoundKind]}")
    params = {}
    for name, value in args.param:
        params[name] = Fraction(value) if name in ("er_s", "delta") else int(value)
    value = bound_value(kind, params, consts)
    doc = {"kind": kind.value, "params": {k: str(v) for k, v in params.items()},
           "required": list(BOUND_PARAMS[kind]), "value": value}
    _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        try:
            consts = DEFAULT.with_overrides(dict(args.const))
        except (KeyError, ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"bad --const: {e}")
        if args.experiment == "bounds":
            return _bounds(args, consts)
        if args.experiment == "verify-lemmas":
            report = verify_lemmas(args.seed)
            _emit(json.dumps(report, sort_keys=True, indent=1) + "\n", args.out)
            failed = sum(len(v["failures"]) for v in report.values())
            return EXIT_OK if failed == 0 else 1
        cfg = ExperimentConfig(experiment=args.experiment, n=args.n, d=args.d, tau=args.tau,
                               band=args.band, bands=args.bands, B=args.B, c2=args.c2, atoms=args.atoms,
                               delta=args.delta, trials=args.trials, seed=args.seed,
                               workers=args.workers, consts=consts)
        outcomes, summary = run_trials(cfg)
        if args.out:
            write_outputs(outcomes, summary, args.out, args.format)
        else:
            from .harness import render_csv, render_jsonl
            _emit(render_jsonl(outcomes, summary) if args.format == "json" else render_csv(outcomes), None)
        return EXIT_OK
    except ConstructionInfeasible as e:
        print(f"uclab: construction infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, InvalidArgument) as e:
        print(f"uclab: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
