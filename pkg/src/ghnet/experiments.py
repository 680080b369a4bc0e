"""Batch experiments: the d_GH / d_EH sandwich and cone-annulus probe campaigns.

Reports are JSON lines, one object per instance or probe, followed by a
single ``{"summary": ...}`` object.  Keys are sorted and no timings are
recorded, so identical configurations give byte-identical files.

Random instances come from ``numpy.random.default_rng(seed)`` (PCG64);
instance ``i`` of a sandwich batch is ``rng.random((cloud_size, dim))`` for
``a`` followed by the same call for ``b``, drawn in index order.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import DimensionError, PreconditionError, SizeLimitError, TheoremViolation, UnsupportedDimensionError
from .euclidean import DEFAULT_ANGLE_STEPS, DEFAULT_RESTARTS, eh_oracle_planar, eh_upper, sandwich_check
from .gh import DEFAULT_BUDGET, gh_exact_bnb
from .io import ingest as _ingest
from .metric import TOL_METRIC, Ball, FiniteMetricSpace, PointCloud, induced_metric
from .nets import (
    BoxRegion,
    ConstantSchedule,
    annulus_cone_probe,
    constant_schedule,
    covering_radius_in_box,
    empty_ball_cone_cover_check,
    unit,
)

SANDWICH_MAX_CLOUD = 8
GENERATORS = ("uniform", "identical")
PRESETS = ("grid", "punched-grid", "hyperplane-sample")
HYPERPLANE_WIDTHS = (1.0, 2.0, 4.0, 8.0)


@dataclass(frozen=True)
class Tolerances:
    tol_metric: float = TOL_METRIC
    tol_conv: float = 1e-9
    resolution: float = 0.01

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not v > 0:
                raise PreconditionError(f"tolerance {name} must be positive, got {v}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration shared by all batch runners.

    Attributes
    ----------
    seed : int
    instance_count : int
        Number of cloud pairs (sandwich) or random probes (grid preset).
    dim, cloud_size : int
    c_prime : float
        The unknown dimensional constant; right-hand inequality outputs are
        relative to this value.
    tolerances : Tolerances
    output_path : path or None
        JSON-lines report destination; nothing is written when None.
    generator : {"uniform", "identical"}
        Sandwich instance generator; "identical" sets ``b = a``.
    restarts, angle_steps : int
        Passed to ``eh_upper`` and ``eh_oracle_planar``.
    use_oracle : bool
        Use the planar oracle for d_EH (needs dim 2).
    bnb_budget : int
    threads : int
        Worker processes for sandwich instances; the report order is by
        instance index either way.
    probe_c : float
        The ``c`` of the constant schedule in probe campaigns.
    """

    seed: int = 0
    instance_count: int = 100
    dim: int = 2
    cloud_size: int = 6
    c_prime: float = 1.0
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_path: Optional[Union[str, Path]] = None
    generator: str = "uniform"
    restarts: int = DEFAULT_RESTARTS
    angle_steps: int = DEFAULT_ANGLE_STEPS
    use_oracle: bool = False
    bnb_budget: int = DEFAULT_BUDGET
    threads: int = 1
    probe_c: float = 1.0

    def __post_init__(self):
        for name in ("instance_count", "dim", "cloud_size", "restarts", "angle_steps", "bnb_budget", "threads"):
            if getattr(self, name) < 1:
                raise PreconditionError(f"{name} must be positive, got {getattr(self, name)}")
        if not (self.c_prime > 0 and self.probe_c > 0):
            raise PreconditionError("c_prime and probe_c must be positive")
        if self.generator not in GENERATORS:
            raise PreconditionError(f"unknown generator {self.generator!r}; choose from {GENERATORS}")

    def to_json(self) -> dict:
        # the destination is not part of the experiment: reports written to
        # different paths must still be byte-identical
        d = asdict(self)
        del d["output_path"]
        return d


@dataclass
class ReportRecord:
    """Per-instance records plus batch aggregates."""

    instances: list
    summary: dict

    def to_jsonl(self) -> str:
        lines = [json.dumps(r, sort_keys=True) for r in self.instances]
        lines.append(json.dumps({"summary": self.summary}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_jsonl())


def ingest(path: Union[str, Path], tol_metric: float = TOL_METRIC) -> Union[PointCloud, FiniteMetricSpace]:
    """Load a CSV point cloud or a JSON distance matrix, validated."""
    return _ingest(path, tol_metric)


# ---------------------------------------------------------------- sandwich

def _instance_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _sandwich_instance(args) -> dict:
    cfg, index, A, B = args
    a, b = PointCloud(A), PointCloud(B)
    gh = gh_exact_bnb(induced_metric(a), induced_metric(b), cfg.bnb_budget)
    if not gh.exact:
        raise SizeLimitError(f"instance {index}: branch-and-bound budget exhausted before an exact value")
    if cfg.use_oracle:
        eh = eh_oracle_planar(a, b, cfg.angle_steps)
    else:
        eh = eh_upper(a, b, cfg.restarts, _instance_seed(cfg.seed, index), cfg.tolerances.tol_conv)
    rep = sandwich_check(a, b, gh, eh, cfg.c_prime)
    rec = {"index": index, **rep.to_json(), "eh_gap_bound": eh.gap_bound}
    rec["a"], rec["b"] = A.tolist(), B.tolist()
    rec["gh_witness_pairs"] = [list(p) for p in gh.witness.sorted_pairs()]
    rec["eh_motion"] = eh.motion.to_json()
    return rec


def _dump_reproducer(cfg: ExperimentConfig, rec: dict) -> Path:
    base = Path(cfg.output_path) if cfg.output_path is not None else Path("sandwich")
    path = base.with_name(f"{base.name}.reproducer-{rec['index']}.json")
    path.write_text(json.dumps({"config": cfg.to_json(), "instance": rec}, sort_keys=True, indent=1))
    return path


def run_sandwich_experiment(cfg: ExperimentConfig) -> ReportRecord:
    """Check ``d_GH <= d_EH <= c' sqrt(M d_GH)`` on random cloud pairs.

    Raises
    ------
    SizeLimitError
        ``cloud_size`` above the exact-solver cap.
    UnsupportedDimensionError
        ``use_oracle`` with ``dim != 2``.
    TheoremViolation
        ``d_GH > eh value`` on some instance; the instance is dumped next to
        the report first.
    """
    if cfg.cloud_size > SANDWICH_MAX_CLOUD:
        raise SizeLimitError(
            f"cloud_size {cfg.cloud_size} exceeds {SANDWICH_MAX_CLOUD}: exact d_GH by "
            "branch-and-bound is not guaranteed to finish beyond that"
        )
    if cfg.use_oracle and cfg.dim != 2:
        raise UnsupportedDimensionError(f"the planar oracle needs dim 2, got {cfg.dim}")

    rng = np.random.default_rng(cfg.seed)
    jobs = []
    for i in range(cfg.instance_count):
        A = rng.random((cfg.cloud_size, cfg.dim))
        B = A.copy() if cfg.generator == "identical" else rng.random((cfg.cloud_size, cfg.dim))
        jobs.append((cfg, i, A, B))

    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            records = list(pool.map(_sandwich_instance, jobs))
    else:
        records = [_sandwich_instance(j) for j in jobs]

    c_hats = [r["c_hat"] for r in records if r["c_hat"] is not None]
    summary = {
        "experiment": "sandwich",
        "config": cfg.to_json(),
        "instances": len(records),
        "left_violations": sum(not r["left_ok"] for r in records),
        "right_failures_relative_to_c_prime": sum(not r["right_ok_relative_to_c_prime"] for r in records),
        "max_c_hat": max(c_hats) if c_hats else None,
        "c_hat_defined": len(c_hats),
    }
    report = ReportRecord(records, summary)
    if cfg.output_path is not None:
        report.write(cfg.output_path)

    bad = [r for r in records if not r["left_ok"]]
    if bad:
        path = _dump_reproducer(cfg, bad[0])
        raise TheoremViolation(
            f"d_GH = {bad[0]['d_gh']!r} exceeds eh value {bad[0]['eh_value']!r} "
            f"on instance {bad[0]['index']}", reproducer_path=path)
    return report


# ------------------------------------------------------------- net probes

def _random_axes(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _lattice(steps: int, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    """Planar integer lattice ``[-steps, steps]^2`` and its points scaled by ``spacing``."""
    k = np.arange(-steps, steps + 1)
    I, J = np.meshgrid(k, k, indexing="ij")
    ij = np.stack([I.ravel(), J.ravel()], axis=1)
    return ij, ij * spacing


def _sphere_lattice_radius(min_steps: int, window: int = 64) -> tuple[int, np.ndarray]:
    """Smallest-ish integer L >= ``min_steps`` with many lattice points on the circle of radius L."""
    best = None
    for L in range(min_steps, min_steps + window):
        i = np.arange(-L, L + 1)
        j2 = L * L - i * i
        j = np.round(np.sqrt(j2)).astype(np.int64)
        ok = j * j == j2
        pts = np.concatenate([np.stack([i[ok], j[ok]], 1), np.stack([i[ok], -j[ok]], 1)])
        pts = np.unique(pts, axis=0)
        if best is None or len(pts) > len(best[1]):
            best = (L, pts)
    return best


def _grid_campaign(cfg: ExperimentConfig, sched: ConstantSchedule, rng) -> ReportRecord:
    spacing = sched.c / 2.0
    reach = 2.0 * (sched.N + sched.c)
    inner = 10  # apexes are drawn from lattice points with |i|, |j| <= inner
    steps = int(math.ceil(reach / spacing)) + inner
    ij, pts = _lattice(steps, spacing)
    box = BoxRegion(pts.min(axis=0), pts.max(axis=0))
    pool = np.flatnonzero(np.abs(ij).max(axis=1) <= inner)
    apexes = rng.choice(pool, size=cfg.instance_count)
    axes = _random_axes(rng, cfg.instance_count, 2)

    # probes only see points within N + c of their apex, so they run on the
    # lattice points near the apex pool; indices are mapped back
    near = np.flatnonzero(np.abs(ij).max(axis=1) <= inner + int(math.ceil((sched.N + sched.c) / spacing)) + 1)
    local = PointCloud(pts[near])
    where = {int(g): k for k, g in enumerate(near)}
    records = []
    for k, (base, axis) in enumerate(zip(apexes, axes)):
        margin = float(np.min(np.minimum(pts[base] - box.low, box.high - pts[base])))
        res = annulus_cone_probe(local, where[int(base)], axis, sched).to_json()
        if res["witness"] is not None:
            res["witness"] = int(near[res["witness"]])
        records.append({"probe": k, "apex": pts[base].tolist(), "axis": axis.tolist(),
                        "boundary_margin": margin, **res})
    hits = sum(r["hit"] for r in records)
    summary = {"spacing": spacing, "box": [box.low.tolist(), box.high.tolist()],
               "min_boundary_margin": min(r["boundary_margin"] for r in records),
               "required_margin": reach, "probes": len(records), "hits": hits,
               "hit_rate": hits / len(records)}
    return ReportRecord(records, summary)


def _punched_campaign(cfg: ExperimentConfig, sched: ConstantSchedule) -> ReportRecord:
    spacing = sched.c / 2.0
    min_steps = int(math.ceil(2.0 * (sched.N + sched.c) / spacing))
    L, on_sphere = _sphere_lattice_radius(min_steps)
    steps = L + int(math.ceil((sched.N + sched.c) / spacing)) + 2
    ij, pts = _lattice(steps, spacing)
    # hole = open ball of radius L (lattice units) about the origin; decided in integers
    keep = (ij * ij).sum(axis=1) >= L * L
    ij, pts = ij[keep], pts[keep]
    cloud = PointCloud(pts)
    index = {tuple(p): k for k, p in enumerate(ij.tolist())}
    R = L * spacing
    ball = Ball(np.zeros(2), R)

    records = []
    for k, p in enumerate(on_sphere.tolist()):
        base = index[tuple(p)]
        apex = pts[base]
        res = annulus_cone_probe(cloud, base, -apex, sched)
        cover = empty_ball_cone_cover_check(ball, apex, sched)
        records.append({"probe": k, "apex": apex.tolist(), "axis": unit(-apex).tolist(),
                        **res.to_json(), "cover_check": cover.to_json()})
    hits = sum(r["hit"] for r in records)
    summary = {"spacing": spacing, "hole_radius": R, "required_hole_radius": 2.0 * (sched.N + sched.c),
               "probes": len(records), "hits": hits, "hit_rate": hits / len(records),
               "cover_check_contained": sum(r["cover_check"]["contained"] for r in records)}
    return ReportRecord(records, summary)


def _hyperplane_campaign(cfg: ExperimentConfig) -> ReportRecord:
    # sample of {x_1 = 0} inside [-w, w]^dim on a lattice of spacing h
    h = cfg.tolerances.resolution
    records = []
    for w in HYPERPLANE_WIDTHS:
        m = int(round(2 * w / h))
        axis = np.linspace(-w, w, m + 1)
        grids = np.meshgrid(*([axis] * (cfg.dim - 1)), indexing="ij")
        rest = np.stack([g.ravel() for g in grids], axis=1)
        pts = np.hstack([np.zeros((len(rest), 1)), rest])
        box = BoxRegion(np.full(cfg.dim, -w), np.full(cfg.dim, w))
        cov = covering_radius_in_box(PointCloud(pts), box, cfg.tolerances.resolution)
        gap = 0.5 * (2 * w / m) * math.sqrt(cfg.dim - 1)
        records.append({"half_width": w, "sample_points": len(pts), "covering_radius": cov.radius,
                        "lattice_bound": math.hypot(w, gap), "witness": cov.center.tolist(),
                        "exact": cov.exact})
    W = np.array([r["half_width"] for r in records])
    rad = np.array([r["covering_radius"] for r in records])
    slope, intercept = np.polyfit(W, rad, 1)
    summary = {"sample_spacing": h, "slope": float(slope), "intercept": float(intercept),
               "max_abs_deviation_from_w": float(np.abs(rad - W).max())}
    return ReportRecord(records, summary)


def run_net_probe_campaign(cfg: ExperimentConfig, preset: str) -> ReportRecord:
    """Probe the cone-annulus hitting statement on constructed point sets.

    Presets
    -------
    grid
        Planar lattice of spacing ``c/2``; ``instance_count`` probes with
        random axes from apexes at least ``2(N + c)`` from the boundary.
        Every probe should hit.
    punched-grid
        The same lattice with the open ball of radius ``R >= 2(N + c)``
        about the origin removed; one probe from each lattice point on the
        sphere, aimed at the center.  Every probe should miss, and each is
        paired with the containment verdict of the cone-annulus in the ball.
    hyperplane-sample
        A lattice sample of ``{x_1 = 0}`` in ``[-w, w]^dim`` for several
        ``w``; the covering radius grows like ``w``.
    """
    if preset not in PRESETS:
        raise PreconditionError(f"unknown preset {preset!r}; choose from {PRESETS}")
    if preset in ("grid", "punched-grid") and cfg.dim != 2:
        raise DimensionError(f"preset {preset!r} is planar, got dim {cfg.dim}")
    if preset == "hyperplane-sample" and cfg.dim < 2:
        raise DimensionError("preset 'hyperplane-sample' needs dim >= 2")

    rng = np.random.default_rng(cfg.seed)
    sched = constant_schedule(cfg.probe_c, cfg.c_prime)
    if preset == "grid":
        report = _grid_campaign(cfg, sched, rng)
    elif preset == "punched-grid":
        report = _punched_campaign(cfg, sched)
    else:
        report = _hyperplane_campaign(cfg)
    report.summary = {"experiment": "net-probe", "preset": preset, "config": cfg.to_json(),
                      "schedule": sched.to_json(), **report.summary}
    if cfg.output_path is not None:
        report.write(cfg.output_path)
    return report


__all__ = [
    "ExperimentConfig",
    "ReportRecord",
    "Tolerances",
    "ingest",
    "run_net_probe_campaign",
    "run_sandwich_experiment",
]
