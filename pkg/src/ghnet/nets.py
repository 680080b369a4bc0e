"""Covering radius, cones and the annulus-cone probe.

The probe checks the finite shadow of the key step in the finiteness
argument for subsets of R^n: every point ``a`` of a set at finite GH
distance from R^n has another point of the set in any cone of
half-angle pi/6 with apex ``a``, at distance between ``N - c`` and
``N + c`` from ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import Delaunay, cKDTree

from .errors import DimensionError, MalformedInputError, PreconditionError
from .metric import Ball, PointCloud

# half-angle of the cone generated by a ball of radius N/2 seen from distance N
CONE_HALF_ANGLE = math.asin(0.5)


@dataclass(frozen=True, eq=False)
class BoxRegion:
    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.low, dtype=float))
        hi = np.atleast_1d(np.asarray(self.high, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise MalformedInputError("box bounds must be vectors of equal length")
        if not np.all(lo < hi):
            raise MalformedInputError(f"box needs low < high in every coordinate, got {lo} / {hi}")
        object.__setattr__(self, "low", lo)
        object.__setattr__(self, "high", hi)

    @property
    def dim(self) -> int:
        return self.low.shape[0]

    def corners(self) -> np.ndarray:
        grids = np.meshgrid(*[[l, h] for l, h in zip(self.low, self.high)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def contains(self, x: np.ndarray, tol: float = 0.0) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.all((x >= self.low - tol) & (x <= self.high + tol), axis=1)


@dataclass(frozen=True, eq=False)
class CoveringResult:
    radius: float
    center: np.ndarray
    exact: bool
    resolution: Optional[float] = None

    def __iter__(self):
        # unpacks as (radius, witness_center)
        return iter((self.radius, self.center))

    def to_json(self) -> dict:
        return {"radius": self.radius, "witness_center": self.center.tolist(),
                "exact": self.exact, "resolution": self.resolution}


def _check_cloud_box(a: PointCloud, box: BoxRegion):
    if a.dim != box.dim:
        raise DimensionError(f"cloud in R^{a.dim} but box in R^{box.dim}")


def _best_candidate(tree: cKDTree, box: BoxRegion, cands: np.ndarray) -> tuple[float, np.ndarray]:
    span = float(np.max(box.high - box.low))
    cands = cands[box.contains(cands, tol=1e-12 * span)]
    cands = np.clip(cands, box.low, box.high)
    d, _ = tree.query(cands)
    k = int(np.argmax(d))
    return float(d[k]), cands[k]


def _bisector_box_hits(p: np.ndarray, q: np.ndarray, box: BoxRegion) -> np.ndarray:
    """Intersections of the perpendicular bisectors of p[k], q[k] with the box edges (2-D)."""
    mid = 0.5 * (p + q)
    nrm = q - p  # bisector: <x - mid, nrm> = 0
    out = []
    for axis in (0, 1):
        other = 1 - axis
        for val in (box.low[axis], box.high[axis]):
            ok = np.abs(nrm[:, other]) > 1e-15
            # solve nrm_a (val - mid_a) + nrm_o (y - mid_o) = 0 for y
            y = mid[ok, other] - nrm[ok, axis] * (val - mid[ok, axis]) / nrm[ok, other]
            pts = np.empty((len(y), 2))
            pts[:, axis] = val
            pts[:, other] = y
            out.append(pts)
    return np.concatenate(out) if out else np.empty((0, 2))


def _circumcenters(tri: np.ndarray) -> np.ndarray:
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    d = 2.0 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
    ok = np.abs(d) > 1e-300
    sa, sb, sc = (a ** 2).sum(1), (b ** 2).sum(1), (c ** 2).sum(1)
    ux = (sa * (b[:, 1] - c[:, 1]) + sb * (c[:, 1] - a[:, 1]) + sc * (a[:, 1] - b[:, 1]))
    uy = (sa * (c[:, 0] - b[:, 0]) + sb * (a[:, 0] - c[:, 0]) + sc * (b[:, 0] - a[:, 0]))
    return np.stack([ux[ok] / d[ok], uy[ok] / d[ok]], axis=1)


def _planar_exact(a: PointCloud, box: BoxRegion) -> tuple[float, np.ndarray]:
    # the nearest-site distance is convex inside each Voronoi cell, so its
    # maximum over the box sits at a Voronoi vertex, a Voronoi edge crossing
    # the box boundary, or a box corner
    sites = np.unique(a.points, axis=0)
    tree = cKDTree(sites)
    cands = [box.corners()]
    if len(sites) >= 2:
        centred = sites - sites.mean(axis=0)
        sv = np.linalg.svd(centred, compute_uv=False)
        scale = max(sv[0], 1e-300)
        if len(sites) >= 3 and sv[1] > 1e-10 * scale:
            tri = Delaunay(sites)
            simp = tri.simplices
            cands.append(_circumcenters(sites[simp]))
            edges = np.concatenate([simp[:, [0, 1]], simp[:, [1, 2]], simp[:, [0, 2]]])
            edges = np.unique(np.sort(edges, axis=1), axis=0)
        else:
            # collinear sites: cells are slabs between consecutive bisectors
            direction = np.linalg.svd(centred)[2][0]
            order = np.argsort(centred @ direction, kind="stable")
            edges = np.stack([order[:-1], order[1:]], axis=1)
        cands.append(_bisector_box_hits(sites[edges[:, 0]], sites[edges[:, 1]], box))
    return _best_candidate(tree, box, np.concatenate(cands))


def _line_exact(a: PointCloud, box: BoxRegion) -> tuple[float, np.ndarray]:
    s = np.unique(a.points[:, 0])
    cands = np.concatenate([[box.low[0], box.high[0]], 0.5 * (s[1:] + s[:-1])]).reshape(-1, 1)
    return _best_candidate(cKDTree(s.reshape(-1, 1)), box, cands)


def _approximate(a: PointCloud, box: BoxRegion, resolution: float, max_grid: int = 5_000_000,
                 n_ascent: int = 16) -> tuple[float, np.ndarray]:
    tree = cKDTree(a.points)
    counts = np.floor((box.high - box.low) / resolution).astype(int) + 1
    if np.prod(counts.astype(float)) > max_grid:
        raise PreconditionError(
            f"resolution {resolution} needs {int(np.prod(counts.astype(float)))} grid points; "
            f"limit is {max_grid}"
        )
    axes = [np.linspace(l, h, k) for l, h, k in zip(box.low, box.high, counts)]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    grid = np.concatenate([grid, box.corners()])
    d, _ = tree.query(grid)
    seeds = grid[np.argsort(-d, kind="stable")[:n_ascent]]

    best_r, best_x = float(d.max()), grid[int(np.argmax(d))]
    for x0 in seeds:
        res = minimize(lambda x: -tree.query(x)[0], x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        x = np.clip(res.x, box.low, box.high)
        r = float(tree.query(x)[0])
        if r > best_r:
            best_r, best_x = r, x
    return best_r, best_x


def covering_radius_in_box(a: PointCloud, box: BoxRegion, resolution: float = 0.01) -> CoveringResult:
    """Largest distance from a point of ``box`` to its nearest point of ``a``.

    Exact in dimensions 1 and 2.  In higher dimensions the box is sampled
    on a grid of spacing ``resolution`` and the best samples are refined by
    local ascent; the result is then flagged as approximate.
    """
    _check_cloud_box(a, box)
    if not resolution > 0:
        raise PreconditionError(f"resolution must be positive, got {resolution}")
    if a.dim == 1:
        r, x = _line_exact(a, box)
        return CoveringResult(r, x, exact=True)
    if a.dim == 2:
        r, x = _planar_exact(a, box)
        return CoveringResult(r, x, exact=True)
    r, x = _approximate(a, box, resolution)
    return CoveringResult(r, x, exact=False, resolution=resolution)


def is_epsilon_net_in_box(a: PointCloud, box: BoxRegion, eps: float, resolution: float = 0.01) -> bool:
    if not eps > 0:
        raise PreconditionError(f"eps must be positive, got {eps}")
    return covering_radius_in_box(a, box, resolution).radius <= eps


@dataclass(frozen=True, eq=False)
class ConeSpec:
    """Closed circular cone ``{apex + v : angle(v, axis) <= half_angle}``, apex included."""

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float = CONE_HALF_ANGLE

    def __post_init__(self):
        apex = np.atleast_1d(np.asarray(self.apex, dtype=float))
        axis = np.atleast_1d(np.asarray(self.axis, dtype=float))
        if apex.shape != axis.shape or apex.ndim != 1:
            raise DimensionError("apex and axis must be vectors of the same length")
        if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise PreconditionError(f"axis must be a unit vector (norm {np.linalg.norm(axis)!r})")
        if not 0.0 < self.half_angle < math.pi / 2:
            raise PreconditionError("half_angle must lie in (0, pi/2)")
        object.__setattr__(self, "apex", apex)
        object.__setattr__(self, "axis", axis)

    @classmethod
    def toward(cls, apex, target, half_angle: float = CONE_HALF_ANGLE) -> "ConeSpec":
        v = np.asarray(target, dtype=float) - np.asarray(apex, dtype=float)
        return cls(apex, v / np.linalg.norm(v), half_angle)

    @property
    def dim(self) -> int:
        return self.apex.shape[0]


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise PreconditionError("zero vector has no direction")
    return v / n


def _in_cone(cone: ConeSpec, pts: np.ndarray) -> np.ndarray:
    v = pts - cone.apex
    norm = np.linalg.norm(v, axis=1)
    # relative slack keeps points exactly on the boundary or the axis inside
    return (v @ cone.axis) >= norm * math.cos(cone.half_angle) - 1e-12 * norm


def cone_contains(cone: ConeSpec, x) -> bool:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != cone.apex.shape:
        raise DimensionError(f"point in R^{x.shape[0]} but cone in R^{cone.dim}")
    return bool(_in_cone(cone, x[None, :])[0])


@dataclass(frozen=True)
class ConstantSchedule:
    """``T = sqrt(3c) c'`` and the least integer N with
    ``3 T sqrt(N) < N/2``, ``c < N`` and ``c < T sqrt(N)``."""

    c: float
    c_prime: float
    T: float
    N: int

    def __post_init__(self):
        if not (self.c > 0 and self.c_prime > 0):
            raise PreconditionError("c and c_prime must be positive")
        ok = _schedule_conditions(self.c, self.c_prime, self.N)
        assert all(ok), f"schedule conditions violated for N={self.N}: {ok}"

    def to_json(self) -> dict:
        return {"c": self.c, "c_prime": self.c_prime, "T": self.T, "N": self.N}


def _schedule_conditions(c: float, c_prime: float, N: int) -> tuple[bool, bool, bool]:
    # squared forms, evaluated in exact rational arithmetic on the given floats:
    #   3 T sqrt(N) < N/2   <=>  36 T^2 < N   <=>  108 c c'^2 < N
    #   c < T sqrt(N)       <=>  c^2 < 3 c c'^2 N  <=>  c < 3 c'^2 N
    cf, kf = Fraction(c), Fraction(c_prime)
    return (108 * cf * kf * kf < N, cf < N, cf < 3 * kf * kf * N)


def constant_schedule(c: float, c_prime: float) -> ConstantSchedule:
    if not (c > 0 and c_prime > 0):
        raise PreconditionError("c and c_prime must be positive")
    T = math.sqrt(3.0 * c) * c_prime
    cf, kf = Fraction(c), Fraction(c_prime)
    # every condition is of the form N > bound; start just below the largest
    bound = max(108 * cf * kf * kf, cf, cf / (3 * kf * kf))
    N = max(1, math.floor(bound) - 1)
    while not all(_schedule_conditions(c, c_prime, N)):
        N += 1
    return ConstantSchedule(c=c, c_prime=c_prime, T=T, N=N)


@dataclass(frozen=True)
class ProbeResult:
    hit: bool
    witness: Optional[int]
    candidates: int

    def to_json(self) -> dict:
        return {"hit": self.hit, "witness": self.witness, "candidates": self.candidates}


def annulus_cone_probe(a: PointCloud, base_index: int, axis, schedule: ConstantSchedule,
                       half_angle: float = CONE_HALF_ANGLE) -> ProbeResult:
    """Look for a point of ``a`` in the cone at ``a[base_index]`` inside the
    closed annulus ``N - c <= |x - apex| <= N + c``.

    The witness is the smallest qualifying index.
    """
    if not 0 <= base_index < a.size:
        raise PreconditionError(f"base_index {base_index} out of range [0, {a.size})")
    axis = np.atleast_1d(np.asarray(axis, dtype=float))
    if axis.shape[0] != a.dim:
        raise DimensionError(f"axis in R^{axis.shape[0]} but cloud in R^{a.dim}")
    cone = ConeSpec(a.points[base_index], unit(axis), half_angle)
    inner, outer = schedule.N - schedule.c, schedule.N + schedule.c
    v = a.points - cone.apex
    r = np.sqrt(np.einsum("ij,ij->i", v, v))
    ring = np.flatnonzero((r >= inner) & (r <= outer))
    hits = ring[_in_cone(cone, a.points[ring])] if ring.size else ring
    witness = int(hits.min()) if hits.size else None
    return ProbeResult(hit=witness is not None, witness=witness, candidates=int(ring.size))


@dataclass(frozen=True)
class CoverVerdict:
    contained: bool
    max_distance: float
    radius: float
    samples: int

    def __bool__(self):
        return self.contained

    def to_json(self) -> dict:
        return {"contained": self.contained, "max_distance": self.max_distance,
                "radius": self.radius, "samples": self.samples}


def _perpendicular(u: np.ndarray) -> np.ndarray:
    e = np.zeros_like(u)
    e[int(np.argmin(np.abs(u)))] = 1.0
    w = e - (e @ u) * u
    return w / np.linalg.norm(w)


def cone_annulus_farthest(center: np.ndarray, apex: np.ndarray, inner: float, outer: float,
                          half_angle: float, samples: int = 256) -> tuple[float, int]:
    """Largest distance from ``center`` to the cone-annulus set at ``apex``.

    The cone axis points from the apex at the center.  The set is swept in
    (radius, angle-from-axis) on a ``samples x samples`` grid of genuine
    points in R^n, and the best sample is refined by bounded local search.
    """
    axis = unit(np.asarray(center) - np.asarray(apex))
    perp = _perpendicular(axis)

    def points(s, phi):
        s, phi = np.broadcast_arrays(np.asarray(s, float), np.asarray(phi, float))
        return apex + s[..., None] * (np.cos(phi)[..., None] * axis + np.sin(phi)[..., None] * perp)

    s = np.linspace(inner, outer, samples if outer > inner else 1)
    phi = np.linspace(0.0, half_angle, samples)
    S, PHI = np.meshgrid(s, phi, indexing="ij")
    d = np.linalg.norm(points(S, PHI) - center, axis=-1)
    k = np.unravel_index(int(np.argmax(d)), d.shape)
    best = float(d[k])

    def neg(z):
        return -float(np.linalg.norm(points(z[0], z[1]) - center))

    res = minimize(neg, np.array([S[k], PHI[k]]), method="L-BFGS-B",
                   bounds=[(inner, outer), (0.0, half_angle)])
    return max(best, -float(res.fun)), int(d.size)


def empty_ball_cone_cover_check(ball: Ball, apex_on_sphere, schedule: ConstantSchedule,
                                samples: int = 256, half_angle: float = CONE_HALF_ANGLE) -> CoverVerdict:
    """Is the cone-annulus at a sphere point, aimed at the center, inside the ball?"""
    apex = np.atleast_1d(np.asarray(apex_on_sphere, dtype=float))
    if apex.shape != ball.center.shape:
        raise DimensionError("apex and ball center dimensions differ")
    off = abs(np.linalg.norm(apex - ball.center) - ball.radius)
    if off > 1e-9 * max(1.0, ball.radius):
        raise PreconditionError(f"apex is {off:.3g} away from the sphere")
    far, n = cone_annulus_farthest(ball.center, apex, schedule.N - schedule.c,
                                   schedule.N + schedule.c, half_angle, samples)
    return CoverVerdict(contained=far <= ball.radius, max_distance=far, radius=ball.radius, samples=n)
