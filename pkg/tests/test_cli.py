import json
import subprocess
import sys

import pytest

from ghnet.cli import main


@pytest.fixture
def files(tmp_path):
    (tmp_path / "seg2.csv").write_text("0,0\n2,0\n")
    (tmp_path / "seg1.csv").write_text("0,0\n1,0\n")
    (tmp_path / "two.json").write_text(json.dumps({"size": 2, "dist": [[0, 2], [2, 0]]}))
    (tmp_path / "one.json").write_text(json.dumps({"size": 2, "dist": [[0, 1], [1, 0]]}))
    (tmp_path / "asym.json").write_text(json.dumps({"size": 2, "dist": [[0, 1], [2, 0]]}))
    (tmp_path / "full.json").write_text(json.dumps({"left": 2, "right": 2, "pairs": [[0, 0], [0, 1], [1, 0], [1, 1]]}))
    (tmp_path / "grid.csv").write_text("".join(f"{i},{j}\n" for i in range(4) for j in range(4)))
    return tmp_path


def run(capsys, *argv):
    rc = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return rc, (json.loads(out) if rc == 0 and out.strip() else None), err


def test_gh(files, capsys):
    rc, out, _ = run(capsys, "gh", "--x", files / "two.json", "--y", files / "one.json")
    assert rc == 0 and out["exact"] and out["upper"] == 0.5


def test_gh_brute_with_relation(files, capsys):
    rc, out, _ = run(capsys, "gh", "--x", files / "two.json", "--y", files / "one.json", "--mode", "brute",
                     "--relation", files / "full.json")
    assert rc == 0 and out["upper"] == 0.5 and out["relation_upper"] == 1.0


def test_gh_point_clouds(files, capsys):
    rc, out, _ = run(capsys, "gh", "--x", files / "seg2.csv", "--y", files / "seg1.csv")
    assert rc == 0 and out["upper"] == 0.5


def test_bad_matrix_exit_code(files, capsys):
    rc, _, err = run(capsys, "gh", "--x", files / "asym.json", "--y", files / "one.json")
    assert rc == 1 and "symmetry at (0, 1)" in err


def test_missing_file_exit_code(files, capsys):
    rc, _, err = run(capsys, "hausdorff", "--x", files / "nope.csv", "--y", files / "seg1.csv")
    assert rc == 1 and "no such file" in err.lower()


def test_hausdorff(files, capsys):
    rc, out, _ = run(capsys, "hausdorff", "--x", files / "seg2.csv", "--y", files / "seg1.csv")
    assert rc == 0 and out["value"] == 1.0


def test_eh_oracle(files, capsys):
    rc, out, _ = run(capsys, "eh", "--x", files / "seg2.csv", "--y", files / "seg1.csv", "--oracle",
                     "--angle-steps", "360")
    assert rc == 0 and out["certified"] and out["value"] == pytest.approx(0.5, abs=1e-3)


def test_eh_upper(files, capsys):
    rc, out, _ = run(capsys, "--seed", 3, "eh", "--x", files / "seg2.csv", "--y", files / "seg1.csv",
                     "--restarts", "4")
    assert rc == 0 and not out["certified"] and out["value"] == pytest.approx(0.5, abs=1e-6)


def test_covering_radius(files, capsys):
    rc, out, _ = run(capsys, "covering-radius", "--points", files / "grid.csv", "--box", "0,0,3,3")
    assert rc == 0 and out["radius"] == pytest.approx(2 ** -0.5) and out["exact"]


def test_covering_radius_bad_box(files, capsys):
    rc, _, err = run(capsys, "covering-radius", "--points", files / "grid.csv", "--box", "0,0,3")
    assert rc == 1 and "--box" in err


def test_probe_cone(files, capsys):
    rc, out, _ = run(capsys, "probe-cone", "--points", files / "grid.csv", "--apex-index", "0",
                     "--axis", "1,1", "--c", "1", "--c-prime", "1")
    assert rc == 0 and out["schedule"]["N"] == 109 and out["hit"] is False


def test_out_flag_writes_file(files, capsys):
    dest = files / "h.json"
    rc = main(["--out", str(dest), "hausdorff", "--x", str(files / "seg2.csv"), "--y", str(files / "seg1.csv")])
    assert rc == 0 and json.loads(dest.read_text()) == {"value": 1.0}


def test_experiment_sandwich(files, capsys):
    dest = files / "s.jsonl"
    rc, out, _ = run(capsys, "--seed", 2, "--out", dest, "experiment", "sandwich", "--count", 2, "--size", 3,
                     "--restarts", 4)
    assert rc == 0 and out["left_violations"] == 0 and out["instances"] == 2
    assert len(dest.read_text().splitlines()) == 3


def test_experiment_refusal(files, capsys):
    rc, _, err = run(capsys, "experiment", "sandwich", "--size", 9)
    assert rc == 1 and "exceeds" in err


def test_experiment_net_probe(files, capsys):
    rc, out, _ = run(capsys, "experiment", "net-probe", "--preset", "punched-grid", "--c-prime", "0.5")
    assert rc == 0 and out["hit_rate"] == 0.0


def test_theorem_violation_exit_code(files, capsys, monkeypatch):
    from ghnet import experiments
    from ghnet.euclidean import EHResult, RigidMotion

    monkeypatch.setattr(experiments, "eh_upper",
                        lambda a, b, *args, **kw: EHResult(-1.0, RigidMotion.identity(a.dim), False))
    rc, _, err = run(capsys, "--out", files / "v.jsonl", "experiment", "sandwich", "--count", 1, "--size", 3)
    assert rc == 2 and "reproducer" in err
    assert (files / "v.jsonl.reproducer-0.json").exists()


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "ghnet", "hausdorff", "--x", str(files / "seg2.csv"),
                           "--y", str(files / "seg1.csv")], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout) == {"value": 1.0}
