import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ghnet.errors import DimensionError, MalformedInputError
from ghnet.metric import Ball, FiniteMetricSpace, PointCloud, diameter, induced_metric, validate_metric

UNIT_SQUARE = PointCloud([[0, 0], [1, 0], [1, 1], [0, 1]])

clouds = st.integers(1, 12).flatmap(
    lambda k: st.integers(1, 4).flatmap(
        lambda d: arrays(np.float64, (k, d), elements=st.floats(-100, 100, allow_nan=False))))


def test_two_point_space_is_valid():
    assert validate_metric(FiniteMetricSpace([[0, 1], [1, 0]]), 0.0).ok


def test_asymmetry_reported_at_pair():
    v = validate_metric(FiniteMetricSpace([[0, 1], [2, 0]]), 1e-9)
    assert not v.ok
    assert [(x.axiom, x.indices) for x in v.violations] == [("symmetry", (0, 1))]


def test_triangle_violation_found_by_enumeration():
    m = FiniteMetricSpace([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    v = validate_metric(m, 1e-9)
    found = {x.indices for x in v.violations if x.axiom == "triangle"}
    brute = {(i, j, k) for i, j, k in itertools.permutations(range(3))
             if m.dist[i, k] > m.dist[i, j] + m.dist[j, k] + 1e-9}
    assert (0, 1, 2) in found
    assert found == brute


def test_nonzero_diagonal_and_negative_entries():
    v = validate_metric(FiniteMetricSpace([[1, -1], [-1, 0]]), 1e-9)
    assert {x.axiom for x in v.violations} >= {"diagonal", "negative"}


def test_tolerance_absorbs_roundoff():
    m = FiniteMetricSpace([[0, 1, 2 + 1e-12], [1, 0, 1], [2 + 1e-12, 1, 0]])
    assert validate_metric(m, 1e-9).ok
    assert not validate_metric(m, 0.0).ok


@pytest.mark.parametrize("bad", [[[0, 1]], [[0, np.nan], [np.nan, 0]], [[0, np.inf], [np.inf, 0]]])
def test_malformed_matrices_rejected(bad):
    with pytest.raises(MalformedInputError):
        FiniteMetricSpace(bad)


def test_metric_space_is_read_only():
    m = FiniteMetricSpace([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        m.dist[0, 1] = 5


def test_induced_metric_345():
    np.testing.assert_array_equal(induced_metric(PointCloud([[0, 0], [3, 4]])).dist, [[0, 5], [5, 0]])


def test_induced_metric_singleton():
    m = induced_metric(PointCloud([[2.5, -1]]))
    np.testing.assert_array_equal(m.dist, [[0]])
    assert diameter(m) == 0


def test_unit_square_distances():
    d = induced_metric(UNIT_SQUARE).dist
    off = sorted(d[i, j] for i, j in itertools.combinations(range(4), 2))
    np.testing.assert_allclose(off, [1, 1, 1, 1, math.sqrt(2), math.sqrt(2)], rtol=0, atol=1e-15)
    assert diameter(induced_metric(UNIT_SQUARE)) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_diameter_two_point():
    assert diameter(FiniteMetricSpace([[0, 1], [1, 0]])) == 1


def test_point_cloud_invariants():
    with pytest.raises(MalformedInputError):
        PointCloud(np.zeros((0, 2)))
    with pytest.raises(MalformedInputError):
        PointCloud([[0, np.nan]])
    assert PointCloud([1.0, 2.0, 3.0]).dim == 1


def test_ball_invariants():
    assert Ball([0, 0], 0).radius == 0
    with pytest.raises(MalformedInputError):
        Ball([0, 0], -1)


def test_subspace_reindexes():
    m = induced_metric(PointCloud([[0.0], [1.0], [5.0]]))
    np.testing.assert_array_equal(m.subspace([2, 0]).dist, [[0, 5], [5, 0]])


@given(clouds)
def test_induced_metric_always_validates(pts):
    assert validate_metric(induced_metric(PointCloud(pts))).ok


@given(clouds, st.randoms(use_true_random=False))
def test_diameter_matches_double_loop_and_permutation(pts, rnd):
    c = PointCloud(pts)
    brute = max(float(np.linalg.norm(p - q)) for p in pts for q in pts)
    assert diameter(induced_metric(c)) == pytest.approx(brute, rel=1e-12, abs=1e-12)
    perm = list(range(len(pts)))
    rnd.shuffle(perm)
    assert diameter(induced_metric(PointCloud(pts[perm]))) == diameter(induced_metric(c))


def test_subspace_rejects_bad_index():
    with pytest.raises(DimensionError):
        FiniteMetricSpace([[0, 1], [1, 0]]).subspace([3])
