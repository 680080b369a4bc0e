"""Finite metric spaces, Euclidean point clouds and basic metric quantities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionError, MalformedInputError

TOL_METRIC = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A finite metric space given by its dense distance matrix.

    Construction only checks shape and finiteness; the metric axioms are
    checked by :func:`validate_metric`, so that malformed spaces can still
    be inspected and reported on.
    """

    dist: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise MalformedInputError(
                f"distance matrix must be a non-empty square matrix, got shape {d.shape}"
            )
        if not np.all(np.isfinite(d)):
            bad = tuple(int(v) for v in np.argwhere(~np.isfinite(d))[0])
            raise MalformedInputError(f"non-finite distance at {bad}")
        object.__setattr__(self, "dist", _frozen(d))

    @property
    def size(self) -> int:
        return self.dist.shape[0]

    def subspace(self, indices) -> "FiniteMetricSpace":
        idx = np.asarray(sorted(indices), dtype=int)
        if idx.size == 0 or idx.min() < 0 or idx.max() >= self.size:
            raise DimensionError(f"subspace indices must be a non-empty subset of [0, {self.size})")
        return FiniteMetricSpace(self.dist[np.ix_(idx, idx)])

    def __repr__(self):
        return f"FiniteMetricSpace(size={self.size})"


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Non-empty ordered list of points in R^dim (rows of ``points``).

    Duplicate coordinates are allowed; a point is identified by its index.
    """

    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim == 1:
            p = p.reshape(-1, 1)
        if p.ndim != 2 or p.shape[0] == 0 or p.shape[1] == 0:
            raise MalformedInputError(
                f"point cloud must be a non-empty (k, dim) array, got shape {p.shape}"
            )
        if not np.all(np.isfinite(p)):
            row = int(np.argwhere(~np.isfinite(p))[0][0])
            raise MalformedInputError(f"non-finite coordinate in point {row}")
        object.__setattr__(self, "points", _frozen(p))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"PointCloud(size={self.size}, dim={self.dim})"


@dataclass(frozen=True)
class Ball:
    """Closed ball ``{x : |x - center| <= radius}``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise MalformedInputError("ball center must be a finite vector")
        if not np.isfinite(self.radius) or self.radius < 0:
            raise MalformedInputError(f"ball radius must be >= 0, got {self.radius}")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True)
class Violation:
    axiom: str  # "diagonal" | "negative" | "symmetry" | "triangle"
    indices: tuple[int, ...]
    excess: float


@dataclass(frozen=True)
class MetricVerdict:
    ok: bool
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def describe(self, limit: int = 5) -> str:
        if self.ok:
            return "ok"
        parts = [f"{v.axiom} at {v.indices} (excess {v.excess:.3g})" for v in self.violations[:limit]]
        more = len(self.violations) - limit
        if more > 0:
            parts.append(f"... and {more} more")
        return "; ".join(parts)


def validate_metric(m: FiniteMetricSpace | np.ndarray, tol_metric: float = TOL_METRIC) -> MetricVerdict:
    """Check the metric axioms of a distance matrix.

    Returns a :class:`MetricVerdict`; each violation names the offending
    index pair (diagonal, symmetry) or triple ``(i, j, k)`` meaning
    ``d[i, k] > d[i, j] + d[j, k] + tol_metric``.
    """
    d = m.dist if isinstance(m, FiniteMetricSpace) else FiniteMetricSpace(m).dist
    if tol_metric < 0:
        raise MalformedInputError("tol_metric must be non-negative")
    violations = []

    diag = np.abs(np.diag(d))
    for i in np.flatnonzero(diag > tol_metric):
        violations.append(Violation("diagonal", (int(i),), float(diag[i])))

    neg = np.argwhere(d < -tol_metric)
    for i, j in neg:
        violations.append(Violation("negative", (int(i), int(j)), float(-d[i, j])))

    asym = np.abs(d - d.T)
    for i, j in np.argwhere(np.triu(asym > tol_metric, k=1)):
        violations.append(Violation("symmetry", (int(i), int(j)), float(asym[i, j])))

    # excess[i, j, k] = d[i, k] - d[i, j] - d[j, k]
    excess = d[:, None, :] - d[:, :, None] - d[None, :, :]
    for i, j, k in np.argwhere(excess > tol_metric):
        violations.append(Violation("triangle", (int(i), int(j), int(k)), float(excess[i, j, k])))

    return MetricVerdict(ok=not violations, violations=violations)


def induced_metric(c: PointCloud) -> FiniteMetricSpace:
    """Euclidean distance matrix of a point cloud."""
    d = cdist(c.points, c.points)
    np.fill_diagonal(d, 0.0)
    # cdist is symmetric up to round-off only
    d = np.maximum(d, d.T)
    return FiniteMetricSpace(d)


def diameter(m: FiniteMetricSpace) -> float:
    return float(m.dist.max())
