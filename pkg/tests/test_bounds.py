import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from uclab.bounds import (BinomQuery, BoundKind, Side, binom_tail, bound_value, delta_schedule,
                          exact_lower_tail, exact_upper_tail, log_pmf, paley_zygmund_check,
                          reverse_chernoff_check, stirlerr)
from uclab.constants import DEFAULT
from uclab.errors import InvalidArgument


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_bound_examples():
    assert bound_value(BoundKind.Thm4Realizable, {"n": 100, "delta": 0.02}) == pytest.approx(math.log(100) / 100)
    assert bound_value(BoundKind.Thm4Mean, {"n": 9}) == pytest.approx(0.2)
    v = bound_value(BoundKind.Thm1FirstOrder, {"er_s": 0, "d": 2, "n": 100, "delta": 0.1})
    assert v == pytest.approx((2 * math.log(50) + math.log(10)) / 100)
    assert v == pytest.approx(0.10127, abs=1e-5)


def test_bound_constants_come_from_ledger():
    c = DEFAULT.with_overrides({"thm4_two": 4})
    assert bound_value("thm4-realizable", {"n": 10, "delta": 0.5}, c) == pytest.approx(math.log(8) / 10)


@pytest.mark.parametrize("params", [{"n": 10, "delta": 0}, {"n": 10, "delta": 1}, {"n": 0, "delta": 0.1}])
def test_bound_rejects_out_of_domain(params):
    with pytest.raises(InvalidArgument):
        bound_value(BoundKind.Thm4Realizable, params)


def test_bound_missing_params():
    with pytest.raises(InvalidArgument):
        bound_value(BoundKind.BandLogFree, {"n": 10})


def test_every_kind_evaluates():
    params = {"er_s": Fraction(1, 10), "d": 2, "n": 1000, "delta": 0.05, "i": 4}
    for kind in BoundKind:
        v = bound_value(kind, params)
        assert math.isfinite(v) and v > 0


@pytest.mark.parametrize("i", range(1, 12))
@pytest.mark.parametrize("n", [10, 100, 10**3, 10**5, 10**7])
@pytest.mark.parametrize("delta", [0.5, 0.05, 1e-3, 1e-6])
def test_band_case_split(i, n, delta):
    c = float(DEFAULT.band_split_c)
    if 2.0 ** -i >= c * math.log(1 / delta) / n:
        assert bound_value(BoundKind.BandLogFree, {"i": i, "n": n, "delta": delta}) <= 2.0 ** (-i - 1)


def test_binom_examples():
    assert binom_tail(BinomQuery(1, Fraction(1, 2), 0)).value == pytest.approx(0.5, rel=1e-15)
    assert binom_tail(BinomQuery(10, Fraction(1, 2), 2)).value == pytest.approx(0.0546875, rel=1e-14)
    assert binom_tail(BinomQuery(10, 0, 0)).value == 1.0
    assert binom_tail(BinomQuery(10, 1, 9)).value == 0.0
    assert binom_tail(BinomQuery(10, 1, 10), Side.UPPER).value == 1.0


def test_stirlerr_against_lgamma():
    for n in [1, 5, 15, 16, 30, 200]:
        ref = math.lgamma(n + 1) - (n + 0.5) * math.log(n) + n - 0.5 * math.log(2 * math.pi)
        assert stirlerr(n) == pytest.approx(ref, abs=1e-12)


def test_log_pmf_matches_scipy():
    for n, p in [(10, 0.3), (1000, 0.01), (10**6, 0.25)]:
        for x in [0, 1, n // 3, int(n * p), n - 1, n]:
            assert log_pmf(x, n, p) == pytest.approx(stats.binom.logpmf(x, n, p), rel=1e-11, abs=1e-11)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 400), st.integers(1, 63), st.integers(64, 64), st.data())
def test_binom_tail_matches_exact(n, a, b, data):
    p = Fraction(a, b)
    x = data.draw(st.integers(0, n))
    lo = binom_tail(BinomQuery(n, p, x), Side.LOWER)
    up = binom_tail(BinomQuery(n, p, x), Side.UPPER)
    ex_lo, ex_up = exact_lower_tail(n, p, x), exact_upper_tail(n, p, x)
    if ex_lo > 0:
        assert rel(lo.value, float(ex_lo)) < 1e-12 or rel(lo.log_value, math.log(ex_lo)) < 1e-12
    if ex_up > 0:
        assert rel(up.value, float(ex_up)) < 1e-12 or rel(up.log_value, math.log(ex_up)) < 1e-12


@pytest.mark.parametrize("n,p", [(10**5, 0.1), (10**6, 0.5), (10**6, 1e-4), (10**6, 0.999)])
def test_binom_tail_large_n_against_scipy(n, p):
    mu = n * p
    sd = math.sqrt(mu * (1 - p))
    for x in {max(0, int(mu - 6 * sd)), int(mu - sd), int(mu), min(n, int(mu + 3 * sd))}:
        got = binom_tail(BinomQuery(n, Fraction(repr(p)), x)).value
        assert rel(got, stats.binom.cdf(x, n, p)) < 1e-10


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 300), st.fractions(0, 1, max_denominator=50), st.data())
def test_binom_tail_invariants(n, p, data):
    assert binom_tail(BinomQuery(n, p, n)).value == pytest.approx(1.0, rel=1e-12)
    x = data.draw(st.integers(0, n - 1))
    a = binom_tail(BinomQuery(n, p, x)).value
    b = binom_tail(BinomQuery(n, p, x + 1)).value
    assert a <= b * (1 + 1e-12)
    up = binom_tail(BinomQuery(n, p, x + 1), Side.UPPER).value
    assert a + up == pytest.approx(1.0, rel=1e-12)


def test_binom_query_validation():
    with pytest.raises(InvalidArgument):
        BinomQuery(5, Fraction(1, 2), 6)
    with pytest.raises(InvalidArgument):
        BinomQuery(5, Fraction(3, 2), 1)


def test_reverse_chernoff_examples():
    r = reverse_chernoff_check(1000, Fraction(1, 10), 0.3)
    assert r.valid and r.holds and r.threshold == 70
    assert float(r.lhs) == pytest.approx(stats.binom.cdf(70, 1000, 0.1), rel=1e-9)
    assert r.rhs == pytest.approx(math.exp(-81), rel=1e-12)
    r = reverse_chernoff_check(48, Fraction(1, 2), 0.45)
    assert r.valid
    assert r.lhs == exact_lower_tail(48, Fraction(1, 2), 13)
    assert r.holds == (float(r.lhs) >= math.exp(-9 * 24 * 0.45 ** 2))
    r = reverse_chernoff_check(48, Fraction(1, 2), 0.6)
    assert not r.valid and r.holds in (True, False)
    assert not reverse_chernoff_check(48, Fraction(1, 2), 0.2).valid


def test_paley_zygmund_examples():
    r = paley_zygmund_check(10, Fraction(1, 10))
    assert r.holds and r.rhs == Fraction(1, 8) and r.threshold == 1
    assert r.lhs == 1 - Fraction(9, 10) ** 10
    assert float(r.lhs) == pytest.approx(0.6513, abs=1e-4)
    r = paley_zygmund_check(1, 1)
    assert r.holds and r.lhs == 1
    r = paley_zygmund_check(7, 0)
    assert r.holds and r.lhs == 1 and r.rhs == 0


def test_paley_zygmund_integer_threshold_is_inclusive():
    r = paley_zygmund_check(8, Fraction(1, 2))
    assert r.threshold == 2 and r.lhs == exact_upper_tail(8, Fraction(1, 2), 2)


def test_delta_schedule_examples():
    ds, d0 = delta_schedule(1, Fraction(1, 2))
    assert ds == [Fraction(1, 4)] and d0 == Fraction(1, 4)
    ds, d0 = delta_schedule(2, 0.6)
    assert ds == [Fraction(3, 10), Fraction(1, 10)] and d0 == Fraction(1, 5)


@given(st.integers(1, 200))
def test_delta_schedule_telescopes(m):
    assert sum(Fraction(1, i * (i + 1)) for i in range(1, m + 1)) == 1 - Fraction(1, m + 1)
    ds, d0 = delta_schedule(m, Fraction(1, 7))
    assert sum(ds) + d0 == Fraction(1, 7)


@pytest.mark.parametrize("m,delta", [(0, 0.5), (3, 0), (3, 1), (3, 1.5)])
def test_delta_schedule_invalid(m, delta):
    with pytest.raises(InvalidArgument):
        delta_schedule(m, delta)
