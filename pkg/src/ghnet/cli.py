"""Command-line interface: ``ghnet <command> ...``.

Every command prints one JSON object (experiments print their summary and
write the full JSON-lines report to ``--out``).  Exit status is 0 on
success, 1 on bad input and 2 when a theorem inequality fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import GHNetError, MalformedInputError, TheoremViolation
from .euclidean import (
    DEFAULT_ANGLE_STEPS,
    DEFAULT_RESTARTS,
    eh_oracle_planar,
    eh_upper,
    hausdorff_distance,
)
from .experiments import PRESETS, ExperimentConfig, Tolerances, run_net_probe_campaign, run_sandwich_experiment
from .gh import DEFAULT_BUDGET, gh_distance, gh_upper_from_correspondence
from .io import as_metric, ingest, read_point_cloud, read_relation
from .metric import PointCloud
from .nets import CONE_HALF_ANGLE, BoxRegion, annulus_cone_probe, constant_schedule, covering_radius_in_box


def _floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise MalformedInputError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise MalformedInputError(f"expected finite comma-separated numbers, got {text!r}")
    return vals


def _parse_box(text: str, dim: int) -> BoxRegion:
    vals = _floats(text)
    if len(vals) != 2 * dim:
        raise MalformedInputError(f"--box needs {2 * dim} numbers (low then high) for dim {dim}, got {len(vals)}")
    return BoxRegion(np.array(vals[:dim]), np.array(vals[dim:]))


def _cloud(path: str) -> PointCloud:
    return read_point_cloud(path)


# ------------------------------------------------------------------ commands

def cmd_gh(args) -> dict:
    mx, my = as_metric(ingest(args.x)), as_metric(ingest(args.y))
    res = gh_distance(mx, my, mode=args.mode, budget=args.budget)
    out = res.to_json()
    if args.relation:
        r = read_relation(args.relation)
        out["relation_upper"] = gh_upper_from_correspondence(r, mx, my)
    return out


def cmd_eh(args) -> dict:
    a, b = _cloud(args.x), _cloud(args.y)
    seed = args.seed if args.eh_seed is None else args.eh_seed
    if args.oracle:
        res = eh_oracle_planar(a, b, args.angle_steps)
    else:
        res = eh_upper(a, b, args.restarts, seed)
    return res.to_json()


def cmd_hausdorff(args) -> dict:
    return {"value": hausdorff_distance(_cloud(args.x), _cloud(args.y))}


def cmd_covering(args) -> dict:
    a = _cloud(args.points)
    box = _parse_box(args.box, a.dim)
    return covering_radius_in_box(a, box, args.resolution).to_json()


def cmd_probe(args) -> dict:
    a = _cloud(args.points)
    sched = constant_schedule(args.c, args.c_prime)
    res = annulus_cone_probe(a, args.apex_index, np.array(_floats(args.axis)), sched, args.half_angle)
    return {"schedule": sched.to_json(), "apex_index": args.apex_index, "half_angle": args.half_angle,
            **res.to_json()}


def _config(args, **extra) -> ExperimentConfig:
    return ExperimentConfig(
        seed=args.seed, instance_count=args.count, dim=args.dim, c_prime=args.c_prime,
        tolerances=Tolerances(resolution=args.resolution), output_path=args.out,
        threads=args.threads, **extra)


def cmd_sandwich(args) -> dict:
    cfg = _config(args, cloud_size=args.size, generator=args.generator, restarts=args.restarts,
                  angle_steps=args.angle_steps, use_oracle=args.oracle, bnb_budget=args.budget)
    return run_sandwich_experiment(cfg).summary


def cmd_net_probe(args) -> dict:
    cfg = _config(args, probe_c=args.c)
    return run_net_probe_campaign(cfg, args.preset).summary


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ghnet", description="Gromov-Hausdorff distances and net probes.")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", default=None, help="write the result / report here instead of stdout")
    p.add_argument("--threads", type=int, default=1, help="worker processes for experiments")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("gh", help="exact GH distance between two small spaces")
    q.add_argument("--x", required=True, help="distance-matrix JSON or point-cloud CSV")
    q.add_argument("--y", required=True)
    q.add_argument("--mode", choices=("bnb", "brute"), default="bnb")
    q.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    q.add_argument("--relation", default=None, help="also report the bound from this relation JSON")
    q.set_defaults(func=cmd_gh)

    q = sub.add_parser("eh", help="Euclidean GH distance between point clouds")
    q.add_argument("--x", required=True)
    q.add_argument("--y", required=True)
    q.add_argument("--oracle", action="store_true", help="planar rotation-scan oracle")
    q.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    q.add_argument("--angle-steps", type=int, default=DEFAULT_ANGLE_STEPS)
    q.add_argument("--seed", dest="eh_seed", type=int, default=None)
    q.set_defaults(func=cmd_eh)

    q = sub.add_parser("hausdorff", help="Hausdorff distance between point clouds")
    q.add_argument("--x", required=True)
    q.add_argument("--y", required=True)
    q.set_defaults(func=cmd_hausdorff)

    q = sub.add_parser("covering-radius", help="largest empty ball centred in a box")
    q.add_argument("--points", required=True)
    q.add_argument("--box", required=True, help="lo_1,...,lo_n,hi_1,...,hi_n")
    q.add_argument("--resolution", type=float, default=0.01)
    q.set_defaults(func=cmd_covering)

    q = sub.add_parser("probe-cone", help="annulus-cone probe from one point")
    q.add_argument("--points", required=True)
    q.add_argument("--apex-index", type=int, required=True)
    q.add_argument("--axis", required=True, help="comma-separated vector")
    q.add_argument("--c", type=float, required=True)
    q.add_argument("--c-prime", type=float, required=True)
    q.add_argument("--half-angle", type=float, default=CONE_HALF_ANGLE)
    q.set_defaults(func=cmd_probe)

    q = sub.add_parser("experiment", help="batch experiments")
    esub = q.add_subparsers(dest="experiment", required=True)

    def common(e, count):
        e.add_argument("--count", type=int, default=count)
        e.add_argument("--dim", type=int, default=2)
        e.add_argument("--c-prime", type=float, default=1.0)
        e.add_argument("--resolution", type=float, default=0.01)

    e = esub.add_parser("sandwich", help="d_GH <= d_EH <= c' sqrt(M d_GH) on random pairs")
    common(e, 100)
    e.add_argument("--size", type=int, default=6)
    e.add_argument("--generator", choices=("uniform", "identical"), default="uniform")
    e.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    e.add_argument("--oracle", action="store_true")
    e.add_argument("--angle-steps", type=int, default=DEFAULT_ANGLE_STEPS)
    e.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    e.set_defaults(func=cmd_sandwich)

    e = esub.add_parser("net-probe", help="cone-annulus probe campaigns")
    common(e, 1000)
    e.add_argument("--preset", choices=PRESETS, required=True)
    e.add_argument("--c", type=float, default=1.0)
    e.set_defaults(func=cmd_net_probe)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    experiment = args.command == "experiment"
    try:
        result = args.func(args)
    except TheoremViolation as exc:
        print(f"ghnet: theorem violation: {exc}; reproducer at {exc.reproducer_path}", file=sys.stderr)
        return 2
    except (GHNetError, OSError) as exc:
        print(f"ghnet: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(result, sort_keys=True)
    if args.out and not experiment:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
