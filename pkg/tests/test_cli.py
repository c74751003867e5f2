import json

import yaml

from repscat.cli import main

VELOCITY_CFG = """
experiment: velocity
alpha: 2.0
grid: {dims: 1, points: 512, half_width: 12.0}
hamiltonian:
  quadratic: {n_minus: 1, omegas: [1.0]}
state: {width: 1.0}
schedule: {times: [2.0, 4.0, 6.0, 8.0, 10.0]}
csv: velocity.csv
"""

COOK_ZERO_CFG = """
experiment: cook
grid: {dims: 1, points: 256, half_width: 12.0}
hamiltonian:
  quadratic: {n_minus: 1, omegas: [1.0]}
schedule: {start: 1.0, stop: 5.0, count: 9, spacing: linear}
csv: cook.csv
"""

BAD_ALPHA_CFG = """
experiment: velocity
alpha: 3.0
grid: {dims: 1, points: 256, half_width: 12.0}
hamiltonian:
  repulsive: {alpha: 3.0}
schedule: {times: [1.0, 2.0]}
dt: 0.001
"""

CLASSICAL_CFG = """
experiment: classical
alpha: 1.0
t_final: 160.0
dt: 0.001
record_every: 50
csv: traj.csv
"""

MOURRE_CFG = """
experiment: mourre-scan
alpha: 1.0
E: 0.0
eta: 0.1
radius_range: [1.0, 40.0]
samples: 2000
csv: scan.csv
"""

CONVERGENCE_CFG = """
experiment: convergence
grid: {dims: 1, points: 64, half_width: 8.0}
hamiltonian:
  repulsive: {alpha: 1.0}
t: 0.1
dt_sequence: [4.0e-3, 2.0e-3, 1.0e-3, 5.0e-4]
"""

PROPAGATE_CFG = """
experiment: propagate
grid: {dims: 1, points: 512, half_width: 14.0}
hamiltonian:
  quadratic: {n_minus: 1, omegas: [1.0]}
t: 0.4
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_velocity_run_reports_distance_to_sigma(tmp_path, capsys):
    cfg = _write(tmp_path, "vel.yaml", VELOCITY_CFG)
    out = str(tmp_path / "out")
    rc = main(["run", cfg, "--out", out, "--quiet"])
    assert rc == 0
    summary = json.loads((tmp_path / "out" / "vel.summary.json").read_text())
    assert summary["experiment"] == "velocity"
    assert summary["metrics"]["sigma_alpha"] == 2.0
    assert summary["metrics"]["distance_to_sigma"] <= 0.2
    assert (tmp_path / "out" / "velocity.csv").exists()


def test_malformed_alpha_rejected(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.yaml", BAD_ALPHA_CFG)
    rc = main(["run", cfg, "--out", str(tmp_path / "out"), "--quiet"])
    assert rc == 2
    err = capsys.readouterr().err
    assert "(0, 2]" in err


def test_cook_zero_potential_writes_zero_column(tmp_path):
    cfg = _write(tmp_path, "cook.yaml", COOK_ZERO_CFG)
    rc = main(["run", cfg, "--out", str(tmp_path / "out"), "--quiet"])
    assert rc == 0
    rows = (tmp_path / "out" / "cook.csv").read_text().splitlines()[1:]
    vals = [float(r.split(",")[1]) for r in rows]
    assert all(v == 0.0 for v in vals)


def test_summary_is_bit_identical_across_runs(tmp_path):
    cfg = _write(tmp_path, "vel.yaml", VELOCITY_CFG)
    main(["run", cfg, "--out", str(tmp_path / "a"), "--seed", "7", "--quiet"])
    main(["run", cfg, "--out", str(tmp_path / "b"), "--seed", "7", "--quiet"])
    a = (tmp_path / "a" / "vel.summary.json").read_bytes()
    b = (tmp_path / "b" / "vel.summary.json").read_bytes()
    assert a == b


def test_propagate_classical_mourre_convergence_kinds(tmp_path):
    for name, text in [
        ("prop.yaml", PROPAGATE_CFG),
        ("cls.yaml", CLASSICAL_CFG),
        ("mou.yaml", MOURRE_CFG),
        ("conv.yaml", CONVERGENCE_CFG),
    ]:
        cfg = _write(tmp_path, name, text)
        rc = main(["run", cfg, "--out", str(tmp_path / "out"), "--quiet"])
        assert rc == 0, name


def test_suite_empty_manifest(tmp_path):
    manifest = _write(tmp_path, "m.yaml", "experiments: []\n")
    rc = main(["suite", manifest, "--out", str(tmp_path / "out"), "--quiet"])
    assert rc == 0
    report = json.loads((tmp_path / "out" / "suite_report.json").read_text())
    assert report["results"] == []


def test_suite_duplicate_ids_rejected(tmp_path, capsys):
    cfg = _write(tmp_path, "c.yaml", MOURRE_CFG)
    manifest = _write(
        tmp_path, "m.yaml",
        yaml.safe_dump({"experiments": [
            {"id": "one", "config": "c.yaml"},
            {"id": "one", "config": "c.yaml"},
        ]}),
    )
    rc = main(["suite", manifest, "--out", str(tmp_path / "out"), "--quiet"])
    assert rc == 2
    assert "duplicate" in capsys.readouterr().err


def test_suite_aggregates_and_continues(tmp_path):
    _write(tmp_path, "good.yaml", MOURRE_CFG)
    _write(tmp_path, "bad.yaml", BAD_ALPHA_CFG)
    manifest = _write(
        tmp_path, "m.yaml",
        yaml.safe_dump({"experiments": [
            {"id": "bad", "config": "bad.yaml"},
            {"id": "good", "config": "good.yaml"},
        ]}),
    )
    rc = main(["suite", manifest, "--out", str(tmp_path / "out"), "--quiet"])
    assert rc == 1
    report = json.loads((tmp_path / "out" / "suite_report.json").read_text())
    by_id = {r["id"]: r for r in report["results"]}
    assert not by_id["bad"]["pass"]
    assert by_id["good"]["pass"]
