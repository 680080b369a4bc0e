"""Gromov-Hausdorff distance between small finite metric spaces.

Everything here works with distortions (twice the distance) and only
halves at the very end, so that exact solvers agree to the last bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotACorrespondenceError, SizeLimitError
from .metric import FiniteMetricSpace, diameter
from .relations import Correspondence, Relation, distortion, is_correspondence

BRUTEFORCE_MAX_SIZE = 4
DEFAULT_BUDGET = 10**7
BNB_MAX_COLUMNS = 16


@dataclass(frozen=True)
class GHResult:
    lower: float
    upper: float
    witness: Optional[Correspondence]
    exact: bool
    nodes: int = 0

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def value(self) -> float:
        if not self.exact:
            raise ValueError("GH distance not resolved exactly; use lower/upper")
        return self.upper

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "witness_pairs": None if self.witness is None else [list(p) for p in self.witness.sorted_pairs()],
        }


def gh_lower_diam(mx: FiniteMetricSpace, my: FiniteMetricSpace) -> float:
    """Half the difference of diameters; never exceeds d_GH."""
    return 0.5 * abs(diameter(mx) - diameter(my))


def gh_upper_from_correspondence(r: Relation, mx: FiniteMetricSpace, my: FiniteMetricSpace) -> float:
    if not is_correspondence(r):
        raise NotACorrespondenceError("an upper bound needs a correspondence")
    return 0.5 * distortion(r, mx, my)


def _pair_distortions(mx: FiniteMetricSpace, my: FiniteMetricSpace) -> np.ndarray:
    # D[i, j, k, l] = | d_X(i, k) - d_Y(j, l) |
    return np.abs(mx.dist[:, None, :, None] - my.dist[None, :, None, :])


def _result(lower_dis: float, witness: Correspondence, mx, my, exact: bool, nodes: int = 0) -> GHResult:
    upper = 0.5 * distortion(witness, mx, my)
    lower = upper if exact else min(0.5 * lower_dis, upper)
    return GHResult(lower=lower, upper=upper, witness=witness, exact=exact, nodes=nodes)


def gh_exact_bruteforce(mx: FiniteMetricSpace, my: FiniteMetricSpace) -> GHResult:
    """Exact d_GH by enumerating every relation of ``X x Y``.

    Relations are bitmasks over the ``m*n`` pairs; the distortion of every
    mask is filled in by a subset recurrence
    ``dis(S + {p}) = max(dis(S), max_{q in S} D[p, q])`` and the minimum is
    taken over masks that cover all rows and columns.
    """
    m, n = mx.size, my.size
    if m > BRUTEFORCE_MAX_SIZE or n > BRUTEFORCE_MAX_SIZE:
        raise SizeLimitError(
            f"brute force is capped at {BRUTEFORCE_MAX_SIZE} points per side "
            f"(got {m} and {n}); use gh_exact_bnb"
        )
    P = m * n
    D = _pair_distortions(mx, my).reshape(P, P)
    total = 1 << P

    # rowmax[p, S] = max_{q in S} D[p, q]
    rowmax = np.zeros((P, total))
    dis = np.zeros(total)
    for b in range(P):
        lo, hi = 1 << b, 1 << (b + 1)
        rowmax[:, lo:hi] = np.maximum(rowmax[:, 0:lo], D[:, b:b + 1])
        dis[lo:hi] = np.maximum(dis[0:lo], rowmax[b, 0:lo])

    masks = np.arange(total, dtype=np.int64)
    valid = np.ones(total, dtype=bool)
    for i in range(m):
        bits = sum(1 << (i * n + j) for j in range(n))
        valid &= (masks & bits) != 0
    for j in range(n):
        bits = sum(1 << (i * n + j) for i in range(m))
        valid &= (masks & bits) != 0

    cand = np.flatnonzero(valid)
    best = int(cand[np.argmin(dis[cand])])
    pairs = frozenset((p // n, p % n) for p in range(P) if best >> p & 1)
    witness = Correspondence(m, n, pairs)
    return _result(abs(diameter(mx) - diameter(my)), witness, mx, my, exact=True)


def _profile_correspondence(mx: FiniteMetricSpace, my: FiniteMetricSpace) -> Correspondence:
    """Greedy correspondence matching points with similar sorted distance rows."""
    m, n = mx.size, my.size
    L = max(m, n)
    px = np.sort(mx.dist, axis=1)[:, (np.arange(L) * m) // L]
    py = np.sort(my.dist, axis=1)[:, (np.arange(L) * n) // L]
    cost = np.abs(px[:, None, :] - py[None, :, :]).max(axis=2)
    pairs = {(i, int(np.argmin(cost[i]))) for i in range(m)}
    pairs |= {(int(np.argmin(cost[:, j])), j) for j in range(n)}
    return Correspondence(m, n, frozenset(pairs))


class _BudgetExhausted(Exception):
    pass


class _Search:
    """Depth-first search over minimal correspondences.

    Rows are assigned in order of decreasing eccentricity.  Each row takes
    either a single column, or a set of at least two columns that no other
    row may ever use; every minimal correspondence has this form, and
    removing pairs never increases distortion, so the search is complete.
    """

    def __init__(self, mx, my, budget, incumbent: Correspondence):
        self.m, self.n = mx.size, my.size
        self.D = _pair_distortions(mx, my)
        self.budget = budget
        self.nodes = 0
        self.best_pairs = incumbent.sorted_pairs()
        self.best = distortion(incumbent, mx, my)

        ecc = mx.dist.max(axis=1)
        self.order = sorted(range(self.m), key=lambda i: (-ecc[i], i))

        n = self.n
        subsets = [s for k in range(2, n + 1) for s in itertools.combinations(range(n), k)]
        self.sub_idx = subsets
        self.sub_mask = np.array([sum(1 << j for j in s) for s in subsets], dtype=np.int64)
        self.sub_member = np.zeros((len(subsets), n), dtype=bool)
        for k, s in enumerate(subsets):
            self.sub_member[k, list(s)] = True
        self.sub_diam = np.array(
            [my.dist[np.ix_(s, s)].max() for s in subsets]) if subsets else np.zeros(0)
        self.full = (1 << n) - 1

    def run(self):
        maxc = np.zeros((self.m, self.n))
        self._visit(0, maxc, 0.0, 0, 0, [])

    def _visit(self, depth, maxc, dis, covered, closed, pairs):
        if depth == self.m:
            if covered == self.full and dis < self.best:
                self.best = dis
                self.best_pairs = list(pairs)
            return

        best = self.best
        closed_cols = np.array([(closed >> j) & 1 for j in range(self.n)], dtype=bool)
        rows = self.order[depth:]
        sub = np.where(closed_cols[None, :], np.inf, maxc[rows])
        # every remaining row needs a column, every uncovered column a row
        if sub.min(axis=1).max() >= best:
            return
        uncovered = [j for j in range(self.n) if not (covered >> j) & 1]
        if uncovered and sub[:, uncovered].min(axis=0).max() >= best:
            return

        i = rows[0]
        row = sub[0]
        cands = [(max(dis, row[j]), (j,)) for j in range(self.n) if row[j] < best]
        if len(self.sub_idx):
            free = (~(covered | closed)) & self.full
            ok = (self.sub_mask & ~free) == 0
            if ok.any():
                vals = np.where(self.sub_member[ok], row[None, :], -np.inf).max(axis=1)
                costs = np.maximum(np.maximum(vals, self.sub_diam[ok]), dis)
                for k, cst in zip(np.flatnonzero(ok), costs):
                    if cst < best:
                        cands.append((float(cst), self.sub_idx[k]))
        cands.sort(key=lambda t: t[0])

        for cost, cols in cands:
            if cost >= self.best:
                break
            self.nodes += 1
            if self.nodes > self.budget:
                raise _BudgetExhausted
            cols_l = list(cols)
            new_maxc = np.maximum(maxc, self.D[:, :, i, cols_l].max(axis=2))
            mask = sum(1 << j for j in cols)
            new_closed = closed | mask if len(cols) > 1 else closed
            pairs.extend((i, j) for j in cols)
            self._visit(depth + 1, new_maxc, cost, covered | mask, new_closed, pairs)
            del pairs[len(pairs) - len(cols):]


def gh_exact_bnb(mx: FiniteMetricSpace, my: FiniteMetricSpace, budget: int = DEFAULT_BUDGET) -> GHResult:
    """Branch-and-bound d_GH.

    Parameters
    ----------
    mx, my : FiniteMetricSpace
    budget : int
        Maximum number of search nodes.  When exhausted the best
        correspondence found so far gives ``upper`` and the diameter bound
        gives ``lower``; ``exact`` is then False.

    Returns
    -------
    GHResult
    """
    if my.size > mx.size:
        res = gh_exact_bnb(my, mx, budget)
        return GHResult(res.lower, res.upper, res.witness.transpose(), res.exact, res.nodes)
    if my.size > BNB_MAX_COLUMNS:
        raise SizeLimitError(
            f"branch-and-bound enumerates column subsets; both spaces exceed {BNB_MAX_COLUMNS} points"
        )
    lower_dis = abs(diameter(mx) - diameter(my))
    incumbent = _profile_correspondence(mx, my)
    if distortion(incumbent, mx, my) <= lower_dis:
        return _result(lower_dis, incumbent, mx, my, exact=True)

    search = _Search(mx, my, budget, incumbent)
    exact = True
    try:
        search.run()
    except _BudgetExhausted:
        exact = False
    witness = Correspondence(mx.size, my.size, frozenset(search.best_pairs))
    return _result(lower_dis, witness, mx, my, exact=exact, nodes=search.nodes)


def gh_distance(mx: FiniteMetricSpace, my: FiniteMetricSpace, mode: str = "bnb",
                budget: int = DEFAULT_BUDGET) -> GHResult:
    if mode == "brute":
        return gh_exact_bruteforce(mx, my)
    if mode == "bnb":
        return gh_exact_bnb(mx, my, budget)
    raise ValueError(f"unknown mode {mode!r}")


__all__ = [
    "GHResult",
    "gh_distance",
    "gh_exact_bnb",
    "gh_exact_bruteforce",
    "gh_lower_diam",
    "gh_upper_from_correspondence",
]
