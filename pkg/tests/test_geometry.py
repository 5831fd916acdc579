import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uclab.errors import InvalidArgument
from uclab.geometry import (Angle, BlockLabeling, Closure, HALF_TURN, InhomHalfspace, Label, Openness,
                            Semicircle, WedgeKind, WedgeSpec, angle_from_turns, build_support,
                            block_margins, halfspace_classify, labeling_margin, realize_labeling,
                            semicircle_classify, support_margin,
                            wedge_contains)

LORC, LCRO = Closure.LEFT_OPEN_RIGHT_CLOSED, Closure.LEFT_CLOSED_RIGHT_OPEN

angles = st.builds(Angle, st.integers(-10**6, 10**6), st.integers(1, 720))
radii = st.builds(lambda n, d: Angle.from_fraction(Fraction(n, d) / 2), st.integers(1, 360), st.integers(360, 360))
closures = st.sampled_from([LORC, LCRO])


@pytest.mark.parametrize("num,den,expect", [(0, 1, (0, 1)), (5, 4, (1, 4)), (6, 8, (3, 4)), (-1, 4, (3, 4))])
def test_angle_from_turns(num, den, expect):
    a = angle_from_turns(num, den)
    assert (a.num, a.den) == expect


def test_angle_zero_den():
    with pytest.raises(InvalidArgument):
        angle_from_turns(1, 0)


def test_angle_ordering_exact():
    assert Angle(1, 3) < Angle(334, 1000) and Angle(1, 3) > Angle(333, 1000)
    assert Angle(2, 6) == Angle(1, 3)
    assert Angle(1, 4).radians == pytest.approx(math.pi / 2)


@given(angles)
def test_half_turn_involution(a):
    b = a.add_half_turn()
    # odd den doubles, den = 0 mod 4 keeps it, den = 2 mod 4 halves (1/10 + 1/2 = 3/5)
    expect = {1: 2 * a.den, 2: a.den // 2, 0: a.den}[a.den % 4 if a.den % 2 == 0 else 1]
    assert b.den == expect
    assert b.add_half_turn() == a
    assert math.gcd(a.num, a.den) == 1 and 0 <= a.num < a.den


def test_semicircle_examples():
    zero = Angle(0, 1)
    assert semicircle_classify(Semicircle(zero, LORC), HALF_TURN) is Label.POS
    assert semicircle_classify(Semicircle(zero, LORC), zero) is Label.NEG
    assert semicircle_classify(Semicircle(zero, LCRO), zero) is Label.POS
    assert semicircle_classify(Semicircle(zero, LCRO), HALF_TURN) is Label.NEG


@given(angles, angles, closures)
def test_antipodal_invariance(alpha, theta, closure):
    s = Semicircle(alpha, closure)
    assert semicircle_classify(s, theta) == -semicircle_classify(s, theta.add_half_turn())


@given(angles, angles, closures)
def test_complement_flips(alpha, theta, closure):
    s = Semicircle(alpha, closure)
    assert semicircle_classify(s, theta) == -semicircle_classify(s.complement(), theta)


def test_wedge_examples():
    assert wedge_contains(WedgeSpec(WedgeKind.G, Angle(1, 8)), Angle(1, 8))
    assert not wedge_contains(WedgeSpec(WedgeKind.G, Angle(1, 8), Openness.OPEN), Angle(1, 8))
    assert wedge_contains(WedgeSpec(WedgeKind.H, Angle(1, 4)), HALF_TURN)
    assert not wedge_contains(WedgeSpec(WedgeKind.G, Angle(1, 8)), Angle(0, 1))
    assert wedge_contains(WedgeSpec(WedgeKind.G, Angle(1, 8)), Angle(5, 8))


def test_wedge_radius_validation():
    with pytest.raises(InvalidArgument):
        WedgeSpec(WedgeKind.G, Angle(0, 1))
    with pytest.raises(InvalidArgument):
        WedgeSpec(WedgeKind.G, Angle(3, 4))


@given(st.sampled_from(list(WedgeKind)), st.sampled_from(list(Openness)),
       st.integers(1, 360), st.integers(1, 360), angles)
def test_wedge_nesting(kind, op, a, b, theta):
    s, t = sorted((a, b))
    if wedge_contains(WedgeSpec(kind, Angle(s, 720), op), theta):
        assert wedge_contains(WedgeSpec(kind, Angle(t, 720), op), theta)


@given(st.integers(1, 360), angles)
def test_wedge_shift_disagreement(t, theta):
    # shifting the semicircle by t flips exactly the half-open G wedge of radius t
    h0 = Semicircle(Angle(0, 1))
    ht = Semicircle(Angle(t, 720))
    differ = semicircle_classify(h0, theta) != semicircle_classify(ht, theta)
    assert differ == wedge_contains(WedgeSpec(WedgeKind.G, Angle(t, 720)), theta)


def test_halfspace_examples():
    assert halfspace_classify(InhomHalfspace([1, 0], 0), [2, 5]) is Label.POS
    assert halfspace_classify(InhomHalfspace([0, 0], 0.5), [-7, 3]) is Label.POS
    assert halfspace_classify(InhomHalfspace([1, 0], -1), [1, 0]) is Label.POS
    assert InhomHalfspace([1, 0], 0).homogeneous
    with pytest.raises(InvalidArgument):
        halfspace_classify(InhomHalfspace([1, 0], 0), [1, 0, 0])


def test_support_layout():
    sup = build_support(2, 4)
    np.testing.assert_allclose(sup.coords, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
    sup = build_support(4, 2)
    assert len(sup) == 4
    assert np.all(sup.coords[2:, :2] == 0) and np.all(sup.coords[:2, 2:] == 0)
    sup = build_support(2, 3)
    assert [sup.angle(0, j) for j in range(3)] == [Angle(0, 1), Angle(1, 3), Angle(2, 3)]
    np.testing.assert_allclose(np.linalg.norm(build_support(8, 7).coords, axis=1), 1.0)


@pytest.mark.parametrize("d,k", [(3, 4), (0, 4), (2, 1)])
def test_support_errors(d, k):
    with pytest.raises(InvalidArgument):
        build_support(d, k)


def test_block_labeling_one_negative():
    with pytest.raises(InvalidArgument):
        BlockLabeling.from_negatives(2, [(0, 1), (0, 2)])
    y = BlockLabeling.from_negatives(2, [(1, 3)])
    assert y.negatives == [(1, 3)]


def test_realize_examples():
    sup = build_support(2, 4)
    h = realize_labeling(sup, BlockLabeling.all_positive(1))
    assert np.all(h.w == 0) and h.b == pytest.approx(0.98079, abs=1e-5)
    assert np.all(h.classify_many(sup.coords) == 1)
    h = realize_labeling(sup, BlockLabeling((0,)))
    np.testing.assert_allclose(h.w, [-1, 0])
    assert halfspace_classify(h, sup.point(0, 0)) is Label.NEG
    assert float(sup.point(0, 1) @ h.w + h.b) == pytest.approx(math.cos(math.pi / 16))
    assert halfspace_classify(h, sup.point(0, 1)) is Label.POS


@settings(max_examples=200)
@given(st.sampled_from([2, 4, 8]), st.integers(2, 64), st.data())
def test_realizability_property(d, k, data):
    sup = build_support(d, k)
    neg = tuple(data.draw(st.one_of(st.none(), st.integers(0, k - 1))) for _ in range(sup.blocks))
    y = BlockLabeling(neg)
    h = realize_labeling(sup, y)
    val = sup.coords @ h.w + h.b
    assert np.array_equal(np.where(val >= 0, 1, -1), y.labels(sup))
    assert np.all(block_margins(sup, y, h) >= support_margin(k) - 1e-9)
    assert np.abs(val).min() >= labeling_margin(k) - 1e-9
    assert support_margin(k) > 0 and labeling_margin(k) > 0


def test_negative_point_margin_is_one_minus_bias():
    sup = build_support(2, 8)
    h = realize_labeling(sup, BlockLabeling((3,)))
    val = float(sup.point(0, 3) @ h.w + h.b)
    assert val == pytest.approx(-(1 - math.cos(math.pi / 32)))
    assert abs(val) < support_margin(8)
