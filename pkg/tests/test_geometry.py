from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifsx.geometry import (
    CompactSet,
    DimensionError,
    IntervalUnion,
    directed_distance,
    distance_point_set,
    embed_set,
    hausdorff_distance,
    renet,
    thicken,
    thicken_intervals,
    union,
    union_all,
)
from oracles import brute_hausdorff


def S(*xs):
    return CompactSet.from_points(list(xs))


def test_singletons_at_the_ends():
    assert hausdorff_distance(S(0.0), S(1.0)).distance == 1.0


def test_identical_sets():
    a = CompactSet.from_points(np.random.default_rng(0).random((50, 2)))
    assert hausdorff_distance(a, a).distance == 0.0


def test_asymmetric_directed_parts():
    rep = hausdorff_distance(S(0.0, 1.0), S(0.4))
    assert rep.distance == pytest.approx(0.6, abs=1e-15)
    assert rep.directed_ba == pytest.approx(0.4, abs=1e-15)
    assert rep.witness_ab == ((1.0,), (0.4,))
    assert directed_distance(S(0.4), S(0.0, 1.0)) == pytest.approx(0.4)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        hausdorff_distance(S(0.5), CompactSet.from_points([[0.5, 0.5]]))


def test_point_set_distance():
    assert distance_point_set(0.5, S(0.0, 1.0)) == 0.5
    assert distance_point_set(0.35, S(0.35, 0.8)) == 0.0
    assert distance_point_set(0.1, S(0.35, 0.8)) == pytest.approx(0.25, abs=1e-15)


def test_two_dimensional_distance():
    a = CompactSet.from_points([[0.0, 0.0]])
    b = CompactSet.from_points([[0.3, 0.4]])
    assert hausdorff_distance(a, b).distance == pytest.approx(0.5)


def test_union_examples():
    assert union(S(0.0), S(1.0)).same_points(S(0.0, 1.0))
    a = S(0.2, 0.7)
    assert union(a, a).same_points(a)
    assert union(S(0.0, 0.5), S(0.5, 1.0)).same_points(S(0.0, 0.5, 1.0))
    assert union_all([S(0.1), S(0.2), S(0.1)]).same_points(S(0.1, 0.2))


def test_points_outside_cube_rejected():
    with pytest.raises(ValueError):
        S(1.5)
    with pytest.raises(ValueError):
        CompactSet.from_points(np.empty((0, 1)))


def test_renet_examples():
    assert renet(S(0.0, 0.001, 1.0), 0.01).same_points(S(0.0, 1.0))
    assert len(renet(S(0.2, 0.3, 0.4), 5.0)) == 1
    a = S(0.0, 0.5, 1.0)
    out = renet(a, 0.1)
    assert out.same_points(a)
    assert out.resolution == pytest.approx(0.1)


def test_renet_two_dimensional_cover():
    a = CompactSet.from_points(np.random.default_rng(1).random((400, 2)))
    net = renet(a, 0.1)
    assert directed_distance(a, net) <= 0.1
    pts = net.points
    d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1)) + np.eye(len(pts))
    assert d.min() >= 0.1


def test_thicken_examples():
    (iv,) = thicken(S(0.5), 0.1).intervals
    assert iv == pytest.approx((0.4, 0.6))
    (iv,) = thicken(S(0.2, 0.25), 0.05).intervals
    assert iv == pytest.approx((0.15, 0.3))
    (iv,) = thicken(S(0.02), 0.1).intervals
    assert iv == pytest.approx((0.0, 0.12))
    assert len(thicken(S(0.1, 0.9), 0.1)) == 2


def test_thicken_exact_fractions():
    pieces = [(Fraction(0), Fraction(0)), (Fraction(1, 4), Fraction(1, 2))]
    # a gap of exactly 2 * delta stays open between the two balls
    out = thicken_intervals(pieces, Fraction(1, 8))
    assert out.intervals == ((Fraction(1, 8), Fraction(5, 8)), (Fraction(0), Fraction(1, 8)))
    out = thicken_intervals(pieces, Fraction(3, 16))
    assert out.intervals == ((Fraction(0), Fraction(11, 16)),)


def test_thicken_needs_one_dimension():
    with pytest.raises(DimensionError):
        thicken(CompactSet.from_points([[0.1, 0.2]]), 0.1)


def test_interval_union_validation():
    IntervalUnion(((0.5, 0.6), (0.1, 0.2)))
    IntervalUnion(((0.5, 0.6), (0.2, 0.5)))
    with pytest.raises(ValueError):
        IntervalUnion(((0.1, 0.2), (0.5, 0.6)))


def test_embed_set():
    e = embed_set(S(0.25, 0.75), 3)
    assert e.dim == 3 and np.all(e.points[:, 1:] == 0)


# exact-arithmetic properties on dyadic clouds: every distance is a difference
# of dyadic rationals and is computed without rounding

dyadic = st.integers(0, 1024).map(lambda k: k / 1024)
cloud = st.lists(dyadic, min_size=1, max_size=12)


def H(a, b):
    return hausdorff_distance(S(*a), S(*b)).distance


@settings(max_examples=200, deadline=None)
@given(cloud, cloud)
def test_matches_brute_force(a, b):
    assert H(a, b) == brute_hausdorff(a, b)


@settings(max_examples=200, deadline=None)
@given(cloud, cloud, cloud)
def test_triangle_and_symmetry(a, b, c):
    assert H(a, b) == H(b, a)
    assert H(a, c) <= H(a, b) + H(b, c)


@settings(max_examples=200, deadline=None)
@given(cloud, cloud)
def test_zero_iff_equal(a, b):
    assert (H(a, b) == 0) == (set(a) == set(b))


@settings(max_examples=200, deadline=None)
@given(cloud, cloud, cloud, cloud)
def test_union_inequality(a, b, c, d):
    assert H(a + b, c + d) <= H(a, c) + H(b, d)


@settings(max_examples=100, deadline=None)
@given(cloud, st.sampled_from([1 / 64, 1 / 16, 1 / 4]))
def test_renet_within_radius(a, r):
    assert H(a, list(renet(S(*a), r).points[:, 0])) <= r
