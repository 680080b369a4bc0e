import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghnet.errors import DimensionError, PreconditionError, UnsupportedDimensionError
from ghnet.euclidean import (
    EHResult,
    RigidMotion,
    apply_motion,
    best_rigid_alignment,
    eh_oracle_planar,
    eh_upper,
    hausdorff_bruteforce,
    hausdorff_distance,
    sandwich_check,
)
from ghnet.gh import GHResult, gh_exact_bnb
from ghnet.metric import PointCloud, induced_metric


def rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_motion(rng, n, reflect):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if (np.linalg.det(q) < 0) != reflect:
        q[:, 0] = -q[:, 0]
    return RigidMotion(q, rng.normal(size=n) * 3)


# ---------------------------------------------------------------- Hausdorff

def test_hausdorff_examples():
    a = PointCloud(np.random.default_rng(0).random((7, 2)))
    assert hausdorff_distance(a, a) == 0
    assert hausdorff_distance(PointCloud([0.0]), PointCloud([1.0])) == 1
    assert hausdorff_distance(PointCloud([0.0, 10.0]), PointCloud([2.0])) == 8


def test_hausdorff_dimension_mismatch():
    with pytest.raises(DimensionError):
        hausdorff_distance(PointCloud([[0.0, 0.0]]), PointCloud([0.0]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 9), st.integers(1, 9), st.integers(1, 3))
def test_hausdorff_matches_bruteforce_and_is_symmetric(seed, m, n, dim):
    rng = np.random.default_rng(seed)
    a, b = PointCloud(rng.normal(size=(m, dim))), PointCloud(rng.normal(size=(n, dim)))
    assert hausdorff_distance(a, b) == hausdorff_distance(b, a) == hausdorff_bruteforce(a, b)


@given(st.integers(0, 2**32 - 1))
def test_hausdorff_triangle(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (PointCloud(rng.random((int(rng.integers(1, 8)), 2))) for _ in range(3))
    assert hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12


# ---------------------------------------------------------------- motions

def test_rigid_motion_rejects_non_orthogonal():
    with pytest.raises(PreconditionError):
        RigidMotion(np.array([[2.0, 0], [0, 1]]), np.zeros(2))
    with pytest.raises(DimensionError):
        RigidMotion(np.eye(3), np.zeros(2))


def test_apply_motion_examples():
    c = PointCloud([[1.0, 0.0], [2.0, 3.0]])
    assert np.array_equal(apply_motion(RigidMotion.identity(2), c).points, c.points)
    v = np.array([0.5, -1.0])
    assert np.array_equal(apply_motion(RigidMotion(np.eye(2), v), c).points, c.points + v)
    quarter = apply_motion(RigidMotion(rot(math.pi / 2), np.zeros(2)), PointCloud([[1.0, 0.0]]))
    assert np.allclose(quarter.points, [[0.0, 1.0]], atol=1e-15)


def test_apply_motion_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_motion(RigidMotion.identity(3), PointCloud([[0.0, 0.0]]))


def test_alignment_identity():
    a = PointCloud(np.random.default_rng(1).random((6, 3)))
    m = best_rigid_alignment(a, a, [(i, i) for i in range(6)])
    assert np.allclose(m.linear, np.eye(3), atol=1e-9)
    assert np.allclose(m.translation, 0, atol=1e-9)


def test_alignment_reflection():
    a = PointCloud(np.random.default_rng(2).random((6, 2)))
    b = PointCloud(a.points * np.array([1.0, -1.0]))
    m = best_rigid_alignment(a, b, [(i, i) for i in range(6)])
    assert m.det == pytest.approx(-1.0)
    assert np.abs(m(b.points) - a.points).max() < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_alignment_recovers_inverse_rotation(seed):
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-math.pi, math.pi)
    a = PointCloud(rng.random((8, 2)))
    b = PointCloud(a.points @ rot(theta).T)
    m = best_rigid_alignment(a, b, [(i, i) for i in range(8)])
    assert np.abs(m.linear - rot(-theta)).max() < 1e-6


def test_alignment_needs_pairs():
    a = PointCloud([[0.0, 0.0]])
    with pytest.raises(PreconditionError):
        best_rigid_alignment(a, a, [])


# ---------------------------------------------------------------- eh_upper

@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("reflect", [False, True])
def test_eh_upper_recovers_rigid_copies(dim, reflect):
    rng = np.random.default_rng(10 * dim + reflect)
    a = PointCloud(rng.random((9, dim)))
    b = apply_motion(random_motion(rng, dim, reflect), a)
    res = eh_upper(a, b, restarts=16, seed=0)
    assert res.value <= 1e-6
    assert not res.certified
    assert res.value == hausdorff_distance(a, apply_motion(res.motion, b))


def test_eh_upper_mirror():
    a = PointCloud([[0.0, 0.0], [3.0, 0.0], [0.0, 1.0], [0.5, 2.0]])
    b = PointCloud(a.points * np.array([-1.0, 1.0]))
    assert eh_upper(a, b, restarts=8).value <= 1e-6


def test_eh_upper_is_deterministic():
    rng = np.random.default_rng(5)
    a, b = PointCloud(rng.random((6, 2))), PointCloud(rng.random((6, 2)))
    r1, r2 = eh_upper(a, b, restarts=8, seed=3), eh_upper(a, b, restarts=8, seed=3)
    assert r1.value == r2.value
    assert np.array_equal(r1.motion.linear, r2.motion.linear)


def test_eh_upper_never_above_plain_hausdorff():
    rng = np.random.default_rng(6)
    a = PointCloud(rng.random((7, 2)))
    b = PointCloud(rng.random((5, 2)))
    assert eh_upper(a, b, restarts=8).value <= hausdorff_distance(a, b)


# ---------------------------------------------------------------- planar oracle

def test_oracle_identical():
    a = PointCloud(np.random.default_rng(4).random((5, 2)))
    res = eh_oracle_planar(a, a, angle_steps=360)
    assert res.value <= 1e-8
    assert res.certified


def test_oracle_quarter_turn():
    res = eh_oracle_planar(PointCloud([[0.0, 0.0], [1.0, 0.0]]), PointCloud([[0.0, 0.0], [0.0, 1.0]]), 360)
    assert res.value <= 1e-3


def test_oracle_segment_sliding():
    res = eh_oracle_planar(PointCloud([[0.0, 0.0], [2.0, 0.0]]), PointCloud([[0.0, 0.0], [1.0, 0.0]]), 360)
    assert res.value == pytest.approx(0.5, abs=1e-3)


def test_oracle_reports_gap_bound():
    a = PointCloud([[0.0, 0.0], [2.0, 0.0]])
    res = eh_oracle_planar(a, a, angle_steps=100)
    assert res.gap_bound == pytest.approx(2.0 * (2 * math.pi / 100) / 2)


def test_oracle_planar_only():
    a = PointCloud(np.zeros((2, 3)))
    with pytest.raises(UnsupportedDimensionError):
        eh_oracle_planar(a, a)


@settings(max_examples=5)
@given(st.integers(0, 2**32 - 1))
def test_oracle_invariant_under_rigid_motion(seed):
    rng = np.random.default_rng(seed)
    a, b = PointCloud(rng.random((5, 2))), PointCloud(rng.random((5, 2)))
    moved = apply_motion(random_motion(rng, 2, bool(rng.integers(2))), b)
    assert eh_oracle_planar(a, b, 720).value == pytest.approx(eh_oracle_planar(a, moved, 720).value, abs=1e-7)


@settings(max_examples=5)
@given(st.integers(0, 2**32 - 1))
def test_oracle_and_upper_agree_on_small_pairs(seed):
    rng = np.random.default_rng(seed)
    a, b = PointCloud(rng.random((5, 2))), PointCloud(rng.random((5, 2)))
    orc, up = eh_oracle_planar(a, b, 720), eh_upper(a, b)
    assert abs(orc.value - up.value) <= 1e-3


# ---------------------------------------------------------------- sandwich

def test_sandwich_identical():
    a = PointCloud(np.random.default_rng(8).random((4, 2)))
    m = induced_metric(a)
    rep = sandwich_check(a, a, gh_exact_bnb(m, m), eh_upper(a, a, restarts=4), 1.0)
    assert rep.d_gh == 0 and rep.eh_value <= 1e-12
    assert rep.left_ok and rep.c_hat is None
    assert rep.to_json()["c_hat"] is None


def test_sandwich_left_holds_on_random_pair():
    rng = np.random.default_rng(9)
    a, b = PointCloud(rng.random((5, 2))), PointCloud(rng.random((5, 2)))
    gh = gh_exact_bnb(induced_metric(a), induced_metric(b))
    rep = sandwich_check(a, b, gh, eh_upper(a, b), 1.0)
    assert rep.left_ok
    assert rep.c_hat == pytest.approx(rep.eh_value / math.sqrt(rep.M * rep.d_gh))


def test_sandwich_needs_exact_gh():
    a = PointCloud([[0.0, 0.0]])
    eh = EHResult(0.0, RigidMotion.identity(2), False)
    with pytest.raises(PreconditionError):
        sandwich_check(a, a, GHResult(0.0, 1.0, None, exact=False), eh, 1.0)
