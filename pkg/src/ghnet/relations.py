"""Relations and correspondences between finite index sets.

A relation between spaces of sizes ``left_size`` and ``right_size`` is a
non-empty set of index pairs ``(i, j)``.  A correspondence additionally
covers every index on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    DimensionError,
    EmptyRelationError,
    NotACorrespondenceError,
    PreconditionError,
)
from .metric import FiniteMetricSpace, PointCloud

Pair = tuple[int, int]


@dataclass(frozen=True)
class Relation:
    left_size: int
    right_size: int
    pairs: frozenset[Pair]

    def __post_init__(self):
        if self.left_size < 1 or self.right_size < 1:
            raise DimensionError("relation factors must be non-empty")
        pairs = frozenset((int(i), int(j)) for i, j in self.pairs)
        if not pairs:
            raise EmptyRelationError("a relation must contain at least one pair")
        for i, j in pairs:
            if not (0 <= i < self.left_size and 0 <= j < self.right_size):
                raise DimensionError(
                    f"pair {(i, j)} out of range for sizes ({self.left_size}, {self.right_size})"
                )
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_pairs(cls, left_size: int, right_size: int, pairs: Iterable[Pair]) -> "Relation":
        return cls(left_size, right_size, frozenset(pairs))

    @classmethod
    def identity(cls, size: int) -> "Relation":
        return cls(size, size, frozenset((i, i) for i in range(size)))

    @classmethod
    def full(cls, left_size: int, right_size: int) -> "Relation":
        return cls(left_size, right_size,
                   frozenset((i, j) for i in range(left_size) for j in range(right_size)))

    def transpose(self) -> "Relation":
        return type(self)(self.right_size, self.left_size, frozenset((j, i) for i, j in self.pairs))

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)

    def to_json(self) -> dict:
        return {"left": self.left_size, "right": self.right_size,
                "pairs": [list(p) for p in self.sorted_pairs()]}

    @classmethod
    def from_json(cls, obj: dict) -> "Relation":
        return cls(int(obj["left"]), int(obj["right"]),
                   frozenset((int(i), int(j)) for i, j in obj["pairs"]))

    def __len__(self):
        return len(self.pairs)


def _covers(r: Relation) -> tuple[bool, bool]:
    lefts = {i for i, _ in r.pairs}
    rights = {j for _, j in r.pairs}
    return len(lefts) == r.left_size, len(rights) == r.right_size


class Correspondence(Relation):
    """A relation whose projections onto both factors are surjective."""

    def __post_init__(self):
        super().__post_init__()
        left_ok, right_ok = _covers(self)
        if not (left_ok and right_ok):
            side = "left" if not left_ok else "right"
            missing = _uncovered(self, side)
            raise NotACorrespondenceError(f"{side} indices {missing} are not covered")

    @classmethod
    def of(cls, r: Relation) -> "Correspondence":
        return cls(r.left_size, r.right_size, r.pairs)


def _uncovered(r: Relation, side: str) -> list[int]:
    if side == "left":
        seen = {i for i, _ in r.pairs}
        return [i for i in range(r.left_size) if i not in seen]
    seen = {j for _, j in r.pairs}
    return [j for j in range(r.right_size) if j not in seen]


def is_correspondence(r: Relation) -> bool:
    left_ok, right_ok = _covers(r)
    return left_ok and right_ok


def _pair_arrays(r: Relation) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.array(r.sorted_pairs(), dtype=int)
    return pairs[:, 0], pairs[:, 1]


def distortion(r: Relation, mx: FiniteMetricSpace, my: FiniteMetricSpace) -> float:
    """Largest ``| |x x'| - |y y'| |`` over pairs ``(x, y), (x', y')`` in ``r``."""
    if r.left_size != mx.size or r.right_size != my.size:
        raise DimensionError(
            f"relation sizes ({r.left_size}, {r.right_size}) do not match "
            f"spaces ({mx.size}, {my.size})"
        )
    I, J = _pair_arrays(r)
    return float(np.abs(mx.dist[np.ix_(I, I)] - my.dist[np.ix_(J, J)]).max())


def compose(r1: Relation, r2: Relation) -> Relation:
    """Composition ``r2 . r1``: pairs ``(x, z)`` with a witness ``y``.

    Returns a :class:`Correspondence` when both inputs are correspondences.
    """
    if r1.right_size != r2.left_size:
        raise DimensionError(
            f"cannot compose: middle sizes {r1.right_size} and {r2.left_size} differ"
        )
    forward: dict[int, list[int]] = {}
    for y, z in r2.pairs:
        forward.setdefault(y, []).append(z)
    pairs = frozenset((x, z) for x, y in r1.pairs for z in forward.get(y, ()))
    if not pairs:
        raise EmptyRelationError("composition is empty")
    cls = Correspondence if is_correspondence(r1) and is_correspondence(r2) else Relation
    return cls(r1.left_size, r2.right_size, pairs)


def _check_indices(indices: Iterable[int], size: int) -> set[int]:
    out = {int(i) for i in indices}
    bad = sorted(i for i in out if not 0 <= i < size)
    if bad:
        raise DimensionError(f"indices {bad} out of range [0, {size})")
    return out


def image(r: Relation, a: Iterable[int]) -> set[int]:
    a = _check_indices(a, r.left_size)
    return {j for i, j in r.pairs if i in a}


def preimage(r: Relation, b: Iterable[int]) -> set[int]:
    b = _check_indices(b, r.right_size)
    return {i for i, j in r.pairs if j in b}


def proximity_correspondence(a: PointCloud, b: PointCloud, c: float) -> Correspondence:
    """All index pairs of ``a x b`` at Euclidean distance strictly below ``c``.

    Requires every point of either cloud to have a partner closer than
    ``c`` (i.e. Hausdorff distance below ``c``); the distortion of the
    result is then at most ``2 c``.
    """
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if not c > 0:
        raise PreconditionError(f"c must be positive, got {c}")
    d = cdist(a.points, b.points)
    close = d < c
    for side, rows, name in ((close, d, "a"), (close.T, d.T, "b")):
        lonely = np.flatnonzero(~side.any(axis=1))
        if lonely.size:
            k = int(lonely[0])
            raise PreconditionError(
                f"point {k} of {name} has no partner within {c} "
                f"(nearest at {rows[k].min():.6g}); Hausdorff distance >= c"
            )
    pairs = frozenset((int(i), int(j)) for i, j in np.argwhere(close))
    return Correspondence(a.size, b.size, pairs)


def restrict(r: Relation, sub_left: Iterable[int], sub_right: Iterable[int]) -> Correspondence:
    """Restrict ``r`` to ``sub_left x sub_right`` and reindex.

    Subsets are reindexed in increasing order, so the k-th smallest index
    of ``sub_left`` becomes index k of the result.
    """
    left = sorted(_check_indices(sub_left, r.left_size))
    right = sorted(_check_indices(sub_right, r.right_size))
    if not left or not right:
        raise EmptyRelationError("restriction to an empty subset")
    lpos = {v: k for k, v in enumerate(left)}
    rpos = {v: k for k, v in enumerate(right)}
    pairs = frozenset((lpos[i], rpos[j]) for i, j in r.pairs if i in lpos and j in rpos)
    if not pairs:
        raise NotACorrespondenceError("restriction has no pairs")
    return Correspondence(len(left), len(right), pairs)
