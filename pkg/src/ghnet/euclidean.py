"""Hausdorff distance and Euclidean GH distance between point clouds.

The Euclidean GH distance ``d_EH(X, Y) = inf_T d_H(X, T(Y))`` is an
infimum over all isometries of R^n, reflections included.  ``eh_upper``
works in any dimension and only ever claims an upper bound; the planar
oracle scans the rotation circle exhaustively and reports a gap bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import DimensionError, PreconditionError, UnsupportedDimensionError
from .gh import GHResult
from .metric import PointCloud, diameter, induced_metric

TOL_ORTH = 1e-9
TOL_CONV = 1e-9
DEFAULT_RESTARTS = 64
DEFAULT_ANGLE_STEPS = 3600


@dataclass(frozen=True, eq=False)
class RigidMotion:
    """``x -> linear @ x + translation`` with orthogonal ``linear``."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        L = np.array(self.linear, dtype=float)
        t = np.atleast_1d(np.array(self.translation, dtype=float))
        n = t.shape[0]
        if L.shape != (n, n):
            raise DimensionError(f"linear part {L.shape} does not match translation of length {n}")
        resid = np.abs(L.T @ L - np.eye(n)).max()
        if resid > TOL_ORTH:
            raise PreconditionError(f"linear part is not orthogonal (residual {resid:.3g})")
        L.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "linear", L)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls, dim: int) -> "RigidMotion":
        return cls(np.eye(dim), np.zeros(dim))

    @property
    def dim(self) -> int:
        return self.translation.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.linear.T + self.translation

    def to_json(self) -> dict:
        return {"linear": self.linear.tolist(), "translation": self.translation.tolist()}


@dataclass(frozen=True)
class EHResult:
    value: float
    motion: RigidMotion
    certified: bool
    gap_bound: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "certified": self.certified,
            "motion": self.motion.to_json(),
            "gap_bound": self.gap_bound,
        }


def _check_dims(a: PointCloud, b: PointCloud):
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _directed(src: np.ndarray, tree: cKDTree) -> float:
    return float(tree.query(src)[0].max())


def hausdorff_distance(a: PointCloud, b: PointCloud) -> float:
    """Hausdorff distance between two finite point sets (exact kd-tree queries)."""
    _check_dims(a, b)
    return max(_directed(a.points, cKDTree(b.points)), _directed(b.points, cKDTree(a.points)))


def hausdorff_bruteforce(a: PointCloud, b: PointCloud) -> float:
    _check_dims(a, b)
    d = cdist(a.points, b.points)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def apply_motion(t: RigidMotion, c: PointCloud) -> PointCloud:
    if t.dim != c.dim:
        raise DimensionError(f"motion acts on R^{t.dim}, cloud lives in R^{c.dim}")
    return PointCloud(t(c.points))


def best_rigid_alignment(a: PointCloud, b: PointCloud, matching: Sequence[tuple[int, int]]) -> RigidMotion:
    """Least-squares rigid motion taking ``b`` onto ``a``.

    ``matching`` holds pairs ``(i, j)`` asking that ``b[j]`` land near
    ``a[i]``.  Both determinant signs of the orthogonal Procrustes
    solution are evaluated and the one with smaller residual is returned
    (a proper rotation on ties).
    """
    _check_dims(a, b)
    if len(matching) == 0:
        raise PreconditionError("matching must be non-empty")
    idx = np.asarray(matching, dtype=int)
    Q = a.points[idx[:, 0]]
    P = b.points[idx[:, 1]]
    cq, cp = Q.mean(axis=0), P.mean(axis=0)
    Qc, Pc = Q - cq, P - cp
    n = a.dim
    scale = max(np.abs(Q).max(), np.abs(P).max(), 1.0)
    if np.abs(Qc).max() <= 1e-12 * scale or np.abs(Pc).max() <= 1e-12 * scale:
        return RigidMotion(np.eye(n), cq - cp)

    U, _, Vt = np.linalg.svd(Pc.T @ Qc)
    best = None
    for sign in (1.0, -1.0):
        fix = np.ones(n)
        fix[-1] = sign * np.sign(np.linalg.det(Vt.T @ U.T))
        R = Vt.T @ np.diag(fix) @ U.T
        resid = float(((Pc @ R.T - Qc) ** 2).sum())
        if best is None or resid < best[0]:
            best = (resid, R)
    R = _orthonormalize(best[1])
    return RigidMotion(R, cq - R @ cp)


def _orthonormalize(R: np.ndarray) -> np.ndarray:
    U, _, Vt = np.linalg.svd(R)
    return U @ Vt


def _random_orthogonal(rng: np.random.Generator, n: int, det_sign: float) -> np.ndarray:
    Q, Rr = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(Rr))
    if np.sign(np.linalg.det(Q)) != det_sign:
        Q[:, 0] = -Q[:, 0]
    return Q


def _principal_axis_starts(A: np.ndarray, B: np.ndarray) -> list[np.ndarray]:
    # map the principal frame of B onto that of A under every axis sign pattern
    n = A.shape[1]
    if n > 6:
        return []
    _, Ua = np.linalg.eigh(np.cov(A.T, bias=True).reshape(n, n))
    _, Ub = np.linalg.eigh(np.cov(B.T, bias=True).reshape(n, n))
    return [Ua @ np.diag(signs) @ Ub.T for signs in itertools.product((1.0, -1.0), repeat=n)]


def _icp(a: PointCloud, b: PointCloud, tree_a: cKDTree, start: RigidMotion, tol_conv: float,
         max_iter: int = 200) -> tuple[float, RigidMotion]:
    motion = start
    moved = motion(b.points)
    h = max(_directed(moved, tree_a), _directed(a.points, cKDTree(moved)))
    jb_all = np.arange(b.size)
    for _ in range(max_iter):
        _, ia = tree_a.query(moved)
        _, jb = cKDTree(moved).query(a.points)
        matching = np.concatenate([
            np.stack([ia, jb_all], axis=1),
            np.stack([np.arange(a.size), jb], axis=1),
        ])
        cand = best_rigid_alignment(a, b, matching)
        cand_moved = cand(b.points)
        h_new = max(_directed(cand_moved, tree_a), _directed(a.points, cKDTree(cand_moved)))
        if h_new < h - tol_conv:
            motion, moved, h = cand, cand_moved, h_new
        else:
            break
    return h, motion


def _skew(w: np.ndarray, n: int) -> np.ndarray:
    S = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    S[iu] = w
    return S - S.T


def _minimax_polish(a: PointCloud, b: PointCloud, tree_a: cKDTree, start: RigidMotion, h0: float,
                    tol_conv: float, max_rounds: int = 30) -> tuple[float, RigidMotion]:
    """Decrease the Hausdorff value directly.

    With nearest-neighbour assignments frozen, the Hausdorff value is
    bounded above by the largest assigned distance; that bound is
    minimized over a local chart of the motion (epigraph form, SLSQP), the
    assignments are refreshed, and the loop repeats while the true
    Hausdorff value improves.
    """
    n = a.dim
    k = n * (n - 1) // 2
    motion, h = start, h0
    for _ in range(max_rounds):
        R0, t0 = motion.linear, motion.translation
        moved = motion(b.points)
        _, ia = tree_a.query(moved)
        _, jb = cKDTree(moved).query(a.points)
        A = np.concatenate([a.points[ia], a.points])
        B = np.concatenate([b.points, b.points[jb]])

        def residuals(z):
            R = expm(_skew(z[:k], n)) @ R0 if k else R0
            return ((A - (B @ R.T + t0 + z[k:k + n])) ** 2).sum(axis=1)

        z0 = np.zeros(k + n + 1)
        z0[-1] = residuals(z0).max()
        sol = minimize(
            lambda z: z[-1], z0,
            jac=lambda z: np.eye(len(z))[-1],
            constraints=[{"type": "ineq", "fun": lambda z: z[-1] - residuals(z)}],
            method="SLSQP", options={"ftol": 1e-15, "maxiter": 200},
        )
        z = sol.x
        R = _orthonormalize(expm(_skew(z[:k], n)) @ R0 if k else R0)
        cand = RigidMotion(R, t0 + z[k:k + n])
        cand_moved = cand(b.points)
        h_new = max(_directed(cand_moved, tree_a), _directed(a.points, cKDTree(cand_moved)))
        if h_new < h - tol_conv:
            motion, h = cand, h_new
        else:
            break
    return h, motion


def _direct_polish(a: PointCloud, b: PointCloud, start: RigidMotion, h0: float, rot_step: float,
                   shift_step: float, tol_conv: float, max_evals: int = 400) -> tuple[float, RigidMotion]:
    """Nelder-Mead on the Hausdorff value over a local chart of the motion.

    Unlike the assignment-based steps this sees the true objective, so it
    can slide along kinks where two nearest neighbours swap.
    """
    n = a.dim
    k = n * (n - 1) // 2
    R0, t0 = start.linear, start.translation
    cb = b.points.mean(axis=0)
    A = a.points
    Bc = b.points - cb
    base = t0 + R0 @ cb
    iu = np.triu_indices(n, k=1)

    def rot(z):
        if n == 2:
            c, s = math.cos(z[0]), math.sin(z[0])
            return np.array([[c, -s], [s, c]]) @ R0
        S = np.zeros((n, n))
        S[iu] = z[:k]
        return expm(S - S.T) @ R0

    def f(z):
        # rotate about the moved centroid so the chart is well scaled
        d = cdist(A, Bc @ rot(z).T + (base + z[k:]))
        return max(d.min(axis=1).max(), d.min(axis=0).max())

    def motion_of(z):
        R = _orthonormalize(rot(z))
        return RigidMotion(R, base + z[k:] - R @ cb)

    z0 = np.zeros(k + n)
    simplex = np.vstack([z0, np.diag(np.r_[np.full(k, rot_step), np.full(n, shift_step)])])
    sol = minimize(f, z0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": tol_conv, "fatol": tol_conv * 1e-3,
                            "maxiter": max_evals * (k + n), "maxfev": max_evals * (k + n)})
    if sol.fun < h0:
        motion = motion_of(sol.x)
        return hausdorff_distance(a, apply_motion(motion, b)), motion
    return h0, start


def eh_upper(a: PointCloud, b: PointCloud, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
             tol_conv: float = TOL_CONV, polish: int = 8, screen: int = 20) -> EHResult:
    """Upper bound on d_EH(a, b) by multi-start alignment.

    Starts are the identity plus ``restarts`` orthogonal matrices split
    between both determinant signs: a randomly offset angle lattice in
    the plane; otherwise random matrices plus every sign pattern of the
    principal-axis frame alignment.  Planar starts get their optimal
    translation; other starts align centroids.  Each start is refined by
    nearest-neighbour / Procrustes alternation and, separately, by a short
    direct search (``screen`` evaluations per parameter) on the Hausdorff
    value.  The ``polish`` best distinct results are then refined on the
    Hausdorff value itself.
    The reported value is always the recomputed Hausdorff distance of
    the returned motion.
    """
    _check_dims(a, b)
    n = a.dim
    rng = np.random.default_rng(seed)
    tree_a = cKDTree(a.points)
    ca, cb = a.points.mean(axis=0), b.points.mean(axis=0)

    starts = [np.eye(n)]
    if n == 2:
        # a randomly shifted angle lattice per handedness: no basin wider
        # than the lattice step can be missed
        per_sign = [(restarts + 1) // 2, restarts // 2]
        for sign, count in zip((1.0, -1.0), per_sign):
            if count:
                angles = 2.0 * math.pi * (np.arange(count) + rng.random()) / count
                starts.extend(_rotations(angles, sign))
    else:
        starts.extend(_principal_axis_starts(a.points, b.points))
        for r in range(restarts):
            starts.append(_random_orthogonal(rng, n, 1.0 if r % 2 == 0 else -1.0))

    scale = max(diameter(induced_metric(b)), 1e-12)
    shifts = [ca - R @ cb for R in starts]
    if n == 2:
        # each start rotation gets its optimal translation, capped by a
        # quick golden-section estimate
        Rs = np.array(starts)
        RB = np.einsum("kij,mj->kmi", Rs, b.points)
        span = max(diameter(induced_metric(a)), scale)
        _, caps = _refine_translations(a.points, RB, np.array(shifts), 0.5 * span, 1e-3, shrink=0.25)
        shifts = [_exact_translation(a.points, RB[k], caps[k])[1] for k in range(len(starts))]

    found = []
    for R, shift in zip(starts, shifts):
        start = RigidMotion(R, shift)
        found.append(_icp(a, b, tree_a, start, tol_conv))
        # ICP funnels many starts into a few basins; a short direct search
        # from the raw start keeps the others in play
        h0 = hausdorff_distance(a, apply_motion(start, b))
        found.append(_direct_polish(a, b, start, h0, 0.3, 0.15 * scale, tol_conv, max_evals=screen))
    found.sort(key=lambda hm: hm[0])

    distinct = []
    for h, motion in found:
        if all(abs(h - h2) > 1e-12 or np.abs(motion.linear - m2.linear).max() > 1e-6
               or np.abs(motion.translation - m2.translation).max() > 1e-6 for h2, m2 in distinct):
            distinct.append((h, motion))
        if len(distinct) >= polish:
            break

    best_h, best_motion = found[0]
    for h, motion in distinct:
        h, motion = _minimax_polish(a, b, tree_a, motion, h, tol_conv)
        h, motion = _direct_polish(a, b, motion, h, 0.1, 0.05 * scale, tol_conv)
        if h < best_h:
            best_h, best_motion = h, motion

    value = hausdorff_distance(a, apply_motion(best_motion, b))
    return EHResult(value=value, motion=best_motion, certified=False,
                    metadata={"restarts": restarts, "seed": seed})


def _rotations(angles: np.ndarray, sign: float) -> np.ndarray:
    c, s = np.cos(angles), np.sin(angles)
    R = np.empty((len(angles), 2, 2))
    R[:, 0, 0], R[:, 0, 1] = c, -s * sign
    R[:, 1, 0], R[:, 1, 1] = s, c * sign
    return R


def _batched_hausdorff(A: np.ndarray, moved: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Hausdorff distance from planar ``A`` to each cloud ``moved[k]``."""
    out = np.empty(moved.shape[0])
    ax, ay = A[None, :, 0, None], A[None, :, 1, None]
    for lo in range(0, moved.shape[0], chunk):
        M = moved[lo:lo + chunk]
        dx = ax - M[:, None, :, 0]
        dy = ay - M[:, None, :, 1]
        d2 = dx * dx + dy * dy
        out[lo:lo + chunk] = np.maximum(d2.min(axis=2).max(axis=1), d2.min(axis=1).max(axis=1))
    return np.sqrt(out)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
# axes first, then diagonals: coordinate moves alone stall on kinks of the max
_DIRECTIONS = np.array([[1.0, 0.0], [0.0, 1.0], [_SQ := math.sqrt(0.5), _SQ], [_SQ, -_SQ]])


def _golden_line(A, RB, t, u, halfwidth, tol):
    """Batched golden-section search of ``x -> H(A, RB + t + x u)`` on [-w, w]."""

    def f(x):
        return _batched_hausdorff(A, RB + (t + x[:, None] * u)[:, None, :])

    K = t.shape[0]
    lo = np.full(K, -halfwidth)
    hi = np.full(K, halfwidth)
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi[0] - lo[0] > tol:
        left = fc < fd
        hi, lo = np.where(left, d, hi), np.where(left, lo, c)
        c_left = hi - _INVPHI * (hi - lo)
        d_right = lo + _INVPHI * (hi - lo)
        fx = f(np.where(left, c_left, d_right))
        c, d, fc, fd = (np.where(left, c_left, d), np.where(left, c, d_right),
                        np.where(left, fx, fd), np.where(left, fc, fx))
    take_c = fc <= fd
    return np.where(take_c, c, d), np.where(take_c, fc, fd)


def _refine_translations(A, RB, t, halfwidth, tol, directions=_DIRECTIONS, shrink=0.5):
    """Golden-section descent on the translations of K rotated copies.

    ``RB`` has shape (K, m, 2), ``t`` shape (K, 2).  Each sweep line-searches
    along each of ``directions`` within +-w of the current translation,
    then multiplies w by ``shrink``, until w drops below ``tol``.
    """
    t = t.copy()
    val = _batched_hausdorff(A, RB + t[:, None, :])
    w = halfwidth
    while w > tol:
        for u in directions:
            x, fx = _golden_line(A, RB, t, u, w, max(tol, w / 4))
            better = fx < val
            t = np.where(better[:, None], t + x[:, None] * u, t)
            val = np.where(better, fx, val)
        w *= shrink
    return t, val


def _planar_motion(theta: float, sign: float, t: np.ndarray) -> RigidMotion:
    return RigidMotion(_rotations(np.array([theta]), sign)[0], t)


def _exact_translation(A: np.ndarray, RB: np.ndarray, h_cap: float,
                       chunk: int = 4096) -> tuple[float, np.ndarray]:
    """Globally optimal translation of ``RB`` onto ``A``, if its value is <= ``h_cap``.

    With ``p_ij = a_i - Rb_j`` the objective is a max over groups of the
    distance from ``t`` to the nearest member of the group.  Freezing the
    nearest members at an optimum gives a majorant that touches there, so
    the optimum is the centre of the smallest circle enclosing some of the
    ``p_ij``: a point, a midpoint or a circumcentre of points pairwise
    within ``2 h*``.  Candidates are pruned with ``h* <= h_cap``; the
    pruning is exact as long as ``h_cap`` is an upper bound.
    """
    P = (A[:, None, :] - RB[None, :, :]).reshape(-1, 2)
    cap = h_cap * (1.0 + 1e-9) + 1e-15
    cands, radii = [P], [np.zeros(len(P))]
    pairs = cKDTree(P).query_pairs(2.0 * cap, output_type="ndarray")
    if len(pairs):
        cands.append(0.5 * (P[pairs[:, 0]] + P[pairs[:, 1]]))
        radii.append(0.5 * np.linalg.norm(P[pairs[:, 0]] - P[pairs[:, 1]], axis=1))
        n = len(P)
        adj = np.zeros((n, n), dtype=bool)
        adj[pairs[:, 0], pairs[:, 1]] = True
        # adj is upper-triangular, so i < j < k below
        if n <= 256:
            tri = np.argwhere(adj[:, :, None] & adj[None, :, :] & adj[:, None, :])
        else:
            tri = [np.column_stack([np.full(ks.size, i), np.full(ks.size, j), ks])
                   for i, j in pairs for ks in [np.flatnonzero(adj[i] & adj[j])]]
            tri = np.concatenate(tri) if tri else np.zeros((0, 3), dtype=int)
        if len(tri):
            p = P[tri[:, 0]]
            b, c = P[tri[:, 1]] - p, P[tri[:, 2]] - p
            d = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
            ok = np.abs(d) > 1e-15
            bb, cc = (b * b).sum(axis=1), (c * c).sum(axis=1)
            dd = np.where(ok, d, 1.0)
            u = np.column_stack([(c[:, 1] * bb - b[:, 1] * cc) / dd, (b[:, 0] * cc - c[:, 0] * bb) / dd])
            r2 = (u * u).sum(axis=1)
            keep = ok & (r2 <= cap * cap)
            cands.append(p[keep] + u[keep])
            radii.append(np.sqrt(r2[keep]))
    T = np.concatenate(cands)
    rho = np.concatenate(radii)
    order = np.argsort(rho, kind="stable")
    T, rho = T[order], rho[order]
    groups = P.reshape(len(A), len(RB), 2)

    # the optimum is a candidate whose radius equals its value, so once the
    # radii pass the best value found nothing better remains
    best, best_t = math.inf, None
    bound = cap
    for lo in range(0, len(T), chunk):
        if rho[lo] > bound:
            break
        v = _values_below(groups, T[lo:lo + chunk], bound)
        k = int(np.argmin(v))
        if v[k] < best:
            best, best_t = float(v[k]), T[lo + k]
            bound = min(bound, best)
    if best_t is None:
        # cap was not an upper bound after all; fall back to the plain minimum
        v = _batched_hausdorff(A, RB[None] + T[:, None, :])
        k = int(np.argmin(v))
        return float(v[k]), T[k]
    return best, best_t


def _values_below(P: np.ndarray, T: np.ndarray, cap: float) -> np.ndarray:
    """Hausdorff values at translations ``T`` given ``P[i, j] = a_i - Rb_j``; inf above ``cap``.

    Each row and column of ``P`` is a group; a translation is dropped as
    soon as one group has no member within ``cap``.
    """
    cap2 = cap * cap
    alive = np.arange(len(T))
    worst = np.zeros(len(T))
    groups = [P[i] for i in range(P.shape[0])] + [P[:, j] for j in range(P.shape[1])]
    for G in groups:
        if not alive.size:
            break
        d = T[alive, None, :] - G[None, :, :]
        near = np.einsum("kmi,kmi->km", d, d).min(axis=1)
        keep = near <= cap2
        worst[alive[keep]] = np.maximum(worst[alive[keep]], near[keep])
        alive = alive[keep]
    out = np.full(len(T), np.inf)
    out[alive] = np.sqrt(worst[alive])
    return out


def _circular_minima(val: np.ndarray) -> np.ndarray:
    """Indices of local minima of a periodic sequence, best first."""
    left, right = np.roll(val, 1), np.roll(val, -1)
    idx = np.flatnonzero((val <= left) & (val <= right))
    return idx[np.argsort(val[idx], kind="stable")]


def eh_oracle_planar(a: PointCloud, b: PointCloud, angle_steps: int = DEFAULT_ANGLE_STEPS,
                     tol: float = 1e-8, basins: int = 12, polish: int = 4,
                     scan_tol: float = 1e-3, scan_shrink: float = 0.25,
                     polish_width: float = 0.1) -> EHResult:
    """Rotation-scan computation of d_EH in the plane.

    1. Every rotation ``2 pi k / angle_steps``, with and without a
       reflection, gets a cheap translation estimate (golden-section
       descent from centroid alignment, to ``scan_tol``).
    2. The ``basins`` deepest local minima of that profile per handedness
       are re-solved with the exact translation optimum.
    3. The ``polish`` best of those are refined in angle by a pattern
       search (initial step ``polish_width``, down to ``tol`` radians),
       again with exact translations.

    ``gap_bound`` is ``diam(b) * (2 pi / angle_steps) / 2``, the
    Lipschitz bound for rotating ``b`` by half a grid step.
    """
    _check_dims(a, b)
    if a.dim != 2:
        raise UnsupportedDimensionError(f"the planar oracle needs dim 2, got {a.dim}")
    if angle_steps < 1:
        raise PreconditionError("angle_steps must be positive")
    A, B = a.points, b.points
    ca, cb = A.mean(axis=0), B.mean(axis=0)
    step = 2.0 * math.pi / angle_steps
    span = max(diameter(induced_metric(a)), diameter(induced_metric(b)), scan_tol)

    def rotated(theta, sign):
        return B @ _rotations(np.array([theta]), sign)[0].T

    angles = step * np.arange(angle_steps)
    cands = []  # (value, theta, sign, t)
    for sign in (1.0, -1.0):
        R = _rotations(angles, sign)
        RB = np.einsum("kij,mj->kmi", R, B)
        t0 = ca - np.einsum("kij,j->ki", R, cb)
        t, val = _refine_translations(A, RB, t0, 0.5 * span, scan_tol, shrink=scan_shrink)
        for k in _circular_minima(val)[:basins]:
            cands.append((float(val[k]), float(angles[k]), sign, t[k]))

    best = min(c[0] for c in cands)
    exact = []
    for _, theta, sign, _ in cands:
        h, t = _exact_translation(A, rotated(theta, sign), best)
        if h <= best:
            best = h
        exact.append((h, theta, sign, t))
    exact.sort(key=lambda c: c[0])

    def e(theta, sign):
        return _exact_translation(A, rotated(theta, sign), best)

    # the scan's translations are only local, so its profile can misplace a
    # valley floor by many grid steps: walk downhill with exact translations
    for h, theta, sign, t in exact[:polish]:
        width = polish_width
        while width > tol:
            moved = False
            for th in (theta - width, theta + width):
                v, tt = e(th, sign)
                if v < h:
                    h, theta, t, moved = v, th, tt, True
                    break
            if not moved:
                width *= 0.5
        best = min(best, h)
        exact.append((h, theta, sign, t))

    _, theta, sign, t = min(exact, key=lambda c: c[0])
    motion = _planar_motion(theta, sign, t)
    value = hausdorff_distance(a, apply_motion(motion, b))
    gap = diameter(induced_metric(b)) * step / 2.0
    return EHResult(value=value, motion=motion, certified=True, gap_bound=gap,
                    metadata={"angle_steps": angle_steps, "basins": basins, "angle_tol": tol})


@dataclass(frozen=True)
class SandwichReport:
    d_gh: float
    eh_value: float
    eh_certified: bool
    M: float
    c_prime: float
    rhs: float
    left_ok: bool
    right_ok: bool
    c_hat: Optional[float]

    def to_json(self) -> dict:
        return {
            "d_gh": self.d_gh,
            "eh_value": self.eh_value,
            "eh_certified": self.eh_certified,
            "M": self.M,
            "c_prime": self.c_prime,
            "rhs_relative_to_c_prime": self.rhs,
            "left_ok": self.left_ok,
            "right_ok_relative_to_c_prime": self.right_ok,
            "c_hat": self.c_hat,
        }


# floating slack for d_GH <= d_EH: both sides are computed from the same
# coordinates by different round-off paths
ROUNDOFF = 1e-12


def sandwich_check(a: PointCloud, b: PointCloud, gh: GHResult, eh: EHResult, c_prime: float) -> SandwichReport:
    """Evaluate ``d_GH <= d_EH <= c' M^(1/2) d_GH^(1/2)`` on one instance.

    ``eh.value`` stands in for d_EH, so the left check is
    ``d_GH <= eh.value``.  The implied constant
    ``c_hat = eh.value / sqrt(M d_GH)`` is reported when ``d_GH > 0``.
    """
    _check_dims(a, b)
    if not gh.exact:
        raise PreconditionError("sandwich_check needs an exact GH value, got bounds only")
    if not c_prime > 0:
        raise PreconditionError("c_prime must be positive")
    M = max(diameter(induced_metric(a)), diameter(induced_metric(b)))
    d = gh.upper
    rhs = c_prime * math.sqrt(M) * math.sqrt(d)
    c_hat = eh.value / (math.sqrt(M) * math.sqrt(d)) if d > 0 and M > 0 else None
    return SandwichReport(
        d_gh=d, eh_value=eh.value, eh_certified=eh.certified, M=M, c_prime=c_prime, rhs=rhs,
        left_ok=d <= eh.value + ROUNDOFF, right_ok=eh.value <= rhs + ROUNDOFF, c_hat=c_hat,
    )
