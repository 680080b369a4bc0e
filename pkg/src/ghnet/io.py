"""Reading and writing point clouds, distance matrices and relations."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Union

import numpy as np

from .errors import MalformedInputError, MetricAxiomError
from .metric import TOL_METRIC, FiniteMetricSpace, PointCloud, induced_metric, validate_metric
from .relations import Relation


def read_point_cloud(path: Union[str, Path]) -> PointCloud:
    """CSV, one point per line, no header; dim is taken from the first line."""
    path = Path(path)
    rows = []
    dim = None
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                vals = [float(cell) for cell in row]
            except ValueError as exc:
                raise MalformedInputError(f"{path}:{lineno}: {exc}") from None
            if dim is None:
                dim = len(vals)
            elif len(vals) != dim:
                raise MalformedInputError(f"{path}:{lineno}: expected {dim} fields, got {len(vals)}")
            if not all(np.isfinite(vals)):
                raise MalformedInputError(f"{path}:{lineno}: non-finite coordinate")
            rows.append(vals)
    if not rows:
        raise MalformedInputError(f"{path}: no points")
    return PointCloud(np.array(rows))


def write_point_cloud(c: PointCloud, path: Union[str, Path]) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        for p in c.points:
            w.writerow([repr(float(v)) for v in p])


def read_metric(path: Union[str, Path], tol_metric: float = TOL_METRIC) -> FiniteMetricSpace:
    """JSON ``{"size": k, "dist": [[...], ...]}``, checked against the metric axioms."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: {exc}") from None
    if not isinstance(obj, dict) or "dist" not in obj:
        raise MalformedInputError(f"{path}: expected an object with a 'dist' field")
    try:
        dist = np.array(obj["dist"], dtype=float)
    except (TypeError, ValueError):
        raise MalformedInputError(f"{path}: 'dist' is not a numeric matrix") from None
    if "size" in obj and (dist.ndim != 2 or dist.shape[0] != int(obj["size"])):
        raise MalformedInputError(f"{path}: 'size' is {obj['size']} but dist has shape {dist.shape}")
    m = FiniteMetricSpace(dist)
    verdict = validate_metric(m, tol_metric)
    if not verdict.ok:
        raise MetricAxiomError(f"{path}: {verdict.describe()}")
    return m


def metric_to_json(m: FiniteMetricSpace) -> dict:
    return {"size": m.size, "dist": m.dist.tolist()}


def read_relation(path: Union[str, Path]) -> Relation:
    path = Path(path)
    try:
        return Relation.from_json(json.loads(path.read_text()))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"{path}: {exc}") from None


def ingest(path: Union[str, Path], tol_metric: float = TOL_METRIC) -> Union[PointCloud, FiniteMetricSpace]:
    """Load a point cloud (CSV) or a distance matrix (JSON), by content."""
    path = Path(path)
    if not path.exists():
        raise MalformedInputError(f"{path}: no such file")
    head = path.read_text().lstrip()
    if not head:
        raise MalformedInputError(f"{path}: empty file")
    if head[0] == "{":
        return read_metric(path, tol_metric)
    return read_point_cloud(path)


def as_metric(obj: Union[PointCloud, FiniteMetricSpace]) -> FiniteMetricSpace:
    return induced_metric(obj) if isinstance(obj, PointCloud) else obj
