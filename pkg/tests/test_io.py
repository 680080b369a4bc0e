import json

import numpy as np
import pytest

from ghnet.errors import MalformedInputError, MetricAxiomError
from ghnet.experiments import ingest
from ghnet.io import as_metric, metric_to_json, read_metric, read_point_cloud, read_relation, write_point_cloud
from ghnet.metric import FiniteMetricSpace, PointCloud
from ghnet.relations import Relation


def test_csv_cloud(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("0,0\n1,0\n0.5,2\n")
    c = ingest(p)
    assert isinstance(c, PointCloud)
    assert c.dim == 2 and c.size == 3
    assert np.array_equal(c.points[2], [0.5, 2.0])


def test_csv_round_trip(tmp_path):
    c = PointCloud(np.random.default_rng(0).normal(size=(5, 3)))
    write_point_cloud(c, tmp_path / "c.csv")
    assert np.array_equal(read_point_cloud(tmp_path / "c.csv").points, c.points)


def test_csv_ragged_rows_name_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,0\n1\n")
    with pytest.raises(MalformedInputError, match=":2:"):
        ingest(p)


def test_csv_non_numeric(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,x\n")
    with pytest.raises(MalformedInputError, match=":1:"):
        ingest(p)


def test_csv_non_finite(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,nan\n")
    with pytest.raises(MalformedInputError):
        ingest(p)


def test_matrix_json(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"size": 2, "dist": [[0, 1], [1, 0]]}))
    m = ingest(p)
    assert isinstance(m, FiniteMetricSpace)
    assert m.size == 2
    assert metric_to_json(m) == {"size": 2, "dist": [[0.0, 1.0], [1.0, 0.0]]}


def test_matrix_symmetry_rejection_names_pair(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"size": 2, "dist": [[0, 1], [2, 0]]}))
    with pytest.raises(MetricAxiomError, match=r"symmetry at \(0, 1\)"):
        ingest(p)


def test_matrix_triangle_rejection_names_triple(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}))
    with pytest.raises(MetricAxiomError, match=r"triangle at \(0, 1, 2\)"):
        read_metric(p)


def test_matrix_size_mismatch(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"size": 3, "dist": [[0, 1], [1, 0]]}))
    with pytest.raises(MalformedInputError):
        ingest(p)


def test_matrix_bad_json(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("{not json")
    with pytest.raises(MalformedInputError):
        ingest(p)


def test_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(MalformedInputError, match="empty"):
        ingest(p)


def test_missing_file(tmp_path):
    with pytest.raises(MalformedInputError):
        ingest(tmp_path / "nope.csv")


def test_relation_file(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"left": 2, "right": 1, "pairs": [[0, 0], [1, 0]]}))
    assert read_relation(p) == Relation.from_pairs(2, 1, [(0, 0), (1, 0)])
    p.write_text(json.dumps({"left": 2}))
    with pytest.raises(MalformedInputError):
        read_relation(p)


def test_as_metric():
    c = PointCloud([[0.0, 0.0], [3.0, 4.0]])
    assert np.array_equal(as_metric(c).dist, [[0, 5], [5, 0]])
    m = FiniteMetricSpace([[0.0]])
    assert as_metric(m) is m
