import csv
import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uclab.cli import main
from uclab.errors import ConfigError, InvalidArgument
from uclab.harness import (CSV_COLUMNS, ExperimentConfig, fit_rate, nearest_rank, render_jsonl,
                           run_trials, summarize, wilson_interval)


def test_wilson_examples():
    lo, hi = wilson_interval(0, 10)
    assert lo == 0 and hi == pytest.approx(0.2775, abs=1e-4)
    lo, hi = wilson_interval(10, 10)
    assert hi == 1 and lo == pytest.approx(0.7225, abs=1e-4)
    lo, hi = wilson_interval(5, 10)
    assert (lo, hi) == pytest.approx((0.2366, 0.7634), abs=1e-4)
    with pytest.raises(InvalidArgument):
        wilson_interval(3, 2)
    with pytest.raises(InvalidArgument):
        wilson_interval(0, 0)


@given(st.integers(1, 5000), st.data())
def test_wilson_inside_unit_interval(n, data):
    k = data.draw(st.integers(0, n))
    lo, hi = wilson_interval(k, n)
    assert 0 <= lo <= k / n <= hi <= 1


def test_wilson_coverage():
    rng = np.random.Generator(np.random.Philox(11))
    hits = rng.binomial(1000, 0.3, size=200)
    covered = sum(lo <= 0.3 <= hi for lo, hi in (wilson_interval(int(h), 1000) for h in hits))
    assert covered >= 180


def test_nearest_rank():
    vals = [Fraction(i) for i in range(1, 21)]
    assert nearest_rank(vals, Fraction(1, 2)) == 10
    assert nearest_rank(vals, Fraction(95, 100)) == 19
    assert nearest_rank(vals, Fraction(0)) == 1


NS = [2 ** e for e in range(8, 17, 2)]


def test_fit_rate_examples():
    m = fit_rate([(n, 5 / n) for n in NS])
    assert m.a == pytest.approx(0, abs=1e-9) and m.rss_const == pytest.approx(0, abs=1e-18)
    assert m.classification == "no-log-growth"
    m = fit_rate([(n, math.log(n) / n) for n in NS])
    assert m.a == pytest.approx(1) and m.b == pytest.approx(0, abs=1e-9)
    assert m.rss_log == pytest.approx(0, abs=1e-18) and m.rss_const > 0
    with pytest.raises(InvalidArgument):
        fit_rate([(10, 0.1), (20, 0.05), (20, 0.06)])


def test_fit_rate_calibration():
    rng = np.random.Generator(np.random.Philox(5))
    grid = [n for n in NS for _ in range(4)]
    hits = 0
    for _ in range(100):
        pts = [(n, (2 * math.log(n) + 3 + rng.normal(0, 0.1)) / n) for n in grid]
        lo, hi = fit_rate(pts).slope_ci
        hits += lo <= 2 <= hi
    assert hits >= 90


def test_config_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig("homog-realizable", trials=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig("homog-realizable", n=(100, 50)).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig("agnostic-lb", n=(4096,)).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig("nope").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig("dyadic-lb", n=(65536,), B=6).validate()


def test_single_trial_summary():
    outcomes, s = run_trials(ExperimentConfig("homog-realizable", n=(100,), trials=1, seed=3))
    assert len(outcomes) == 1 and s.rate in (0.0, 1.0)


@pytest.mark.parametrize("exp,extra", [
    ("homog-realizable", {"n": (64, 128), "atoms": 10}),
    ("inhom-realizable", {"n": (64, 128)}),
    ("agnostic-lb", {"n": (4096,), "tau": Fraction(1, 64)}),
    ("bandwise", {"n": (1024,), "bands": (3, 4), "atoms": 8}),
    ("dyadic-lb", {"n": (65536,)}),
])
def test_determinism_across_workers(exp, extra):
    base = dict(experiment=exp, trials=12, seed=99, **extra)
    a = render_jsonl(*run_trials(ExperimentConfig(workers=1, **base)))
    b = render_jsonl(*run_trials(ExperimentConfig(workers=8, **base)))
    assert a == b


def test_aggregation_order_independent():
    outcomes, s = run_trials(ExperimentConfig("bandwise", n=(1024,), bands=(3, 4, 5), atoms=8,
                                              trials=20, seed=1))
    shuffled = outcomes[:]
    random.Random(0).shuffle(shuffled)
    assert json.dumps(summarize(shuffled).to_json()) == json.dumps(s.to_json())
    j = s.to_json()
    assert 0 <= j["ci95"][0] <= j["ci95"][1] <= 1
    for g in j["groups"].values():
        assert g["deviation"]["p95"]["float"] >= g["deviation"]["median"]["float"]


def test_cli_exit_codes(capsys):
    assert main(["homog-realizable", "--n", "100", "--trials", "0"]) == 2
    assert main(["agnostic-lb", "--n", "1048576", "--d", "512", "--tau", "1/64"]) == 3
    assert main(["agnostic-lb", "--n", "100"]) == 2
    assert main(["homog-realizable", "--n", "100", "--const", "nosuch=1"]) == 2
    assert main(["homog-realizable", "--n", "100", "--trials", "2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and json.loads(lines[-1])["type"] == "summary"
    rec = json.loads(lines[0])
    assert set(rec["er_D"]) == {"num", "den", "float"}


def test_cli_bounds(capsys):
    assert main(["bounds", "--kind", "thm4-mean", "--param", "n=9"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(0.2)
    assert main(["bounds", "--kind", "bogus"]) == 2


def test_cli_csv(tmp_path):
    out = tmp_path / "trials.csv"
    assert main(["dyadic-lb", "--n", "65536", "--trials", "5", "--out", str(out), "--format", "csv"]) == 0
    with open(out) as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 6
    summary = json.loads((tmp_path / "trials.csv.summary.json").read_text())
    assert summary["trials"] == 5


def test_cli_files_identical_across_workers(tmp_path):
    paths = []
    for w in (1, 8):
        p = tmp_path / f"w{w}.jsonl"
        assert main(["inhom-realizable", "--n", "256,1024", "--trials", "16", "--seed", "7",
                     "--workers", str(w), "--out", str(p)]) == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()
