"""Plot scripts run against checked-in fixture files, produce images, and
never touch the primary package (enforced by poisoning the import path)."""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

PLOTS = Path(__file__).resolve().parent.parent
FIXTURES = PLOTS / "fixtures"
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@pytest.fixture
def poisoned_env(tmp_path):
    """Environment whose import path shadows the primary package with a
    module that explodes on import: plot scripts must stay pure consumers
    of CSV/JSON files."""
    trap = tmp_path / "trap"
    trap.mkdir()
    (trap / "curvebody.py").write_text(
        'raise RuntimeError("plot scripts must not import the primary package")\n'
    )
    env = dict(os.environ)
    env["PYTHONPATH"] = str(trap)
    env.setdefault("MPLBACKEND", "Agg")
    return env


def run_script(script, args, env):
    return subprocess.run(
        [sys.executable, str(PLOTS / script), *[str(a) for a in args]],
        capture_output=True, text=True, env=env,
    )


def assert_png(path):
    data = Path(path).read_bytes()
    assert data[:8] == PNG_MAGIC and len(data) > 1000


def test_poison_trap_actually_fires(poisoned_env, tmp_path):
    probe = tmp_path / "probe.py"
    probe.write_text("import curvebody\n")
    proc = subprocess.run([sys.executable, str(probe)], capture_output=True,
                          text=True, env=poisoned_env)
    assert proc.returncode != 0
    assert "must not import" in proc.stderr


def test_orbit_pulsating_run(poisoned_env, tmp_path):
    out = tmp_path / "orbit.png"
    proc = run_script("orbit.py", [FIXTURES / "full_trajectory.csv", out],
                      poisoned_env)
    assert proc.returncode == 0, proc.stderr
    assert_png(out)


def test_orbit_relative_equilibrium(poisoned_env, tmp_path):
    out = tmp_path / "circles.png"
    proc = run_script("orbit.py",
                      [FIXTURES / "releq_full_trajectory.csv", out],
                      poisoned_env)
    assert proc.returncode == 0, proc.stderr
    assert_png(out)


def test_orbit_rejects_reduced_csv(poisoned_env, tmp_path):
    proc = run_script("orbit.py",
                      [FIXTURES / "reduced_trajectory.csv", tmp_path / "x.png"],
                      poisoned_env)
    assert proc.returncode != 0
    assert "q_<body>_<coord>" in proc.stderr


def test_orbit_rejects_empty_csv(poisoned_env, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    proc = run_script("orbit.py", [empty, tmp_path / "x.png"], poisoned_env)
    assert proc.returncode != 0

    headed = tmp_path / "headed.csv"
    headed.write_text("time,q_1_1,q_1_2,q_1_3,qdot_1_1,qdot_1_2,qdot_1_3\n")
    proc = run_script("orbit.py", [headed, tmp_path / "y.png"], poisoned_env)
    assert proc.returncode != 0
    assert "no samples" in proc.stderr


def test_conservation_acceptance_run_below_threshold(poisoned_env, tmp_path):
    # the checked-in acceptance summary must show every drift curve below
    # 1e-8, and the script must render it without the primary package
    doc = json.loads((FIXTURES / "reduced_summary.json").read_text())
    series = doc["series"]
    momentum = series["angular_momentum"]
    momentum_drift = max(abs(v - momentum[0]) / abs(momentum[0])
                         for v in momentum)
    constraint_drift = max(series["constraint_drift"])
    spread = max(v for v in series["criterion_spread"] if v is not None)
    assert momentum_drift <= 1e-8
    assert constraint_drift <= 1e-8
    assert spread <= 1e-8

    out = tmp_path / "conservation.png"
    proc = run_script("conservation.py",
                      [FIXTURES / "reduced_summary.json", out], poisoned_env)
    assert proc.returncode == 0, proc.stderr
    assert_png(out)


def test_conservation_full_summary(poisoned_env, tmp_path):
    out = tmp_path / "full_conservation.png"
    proc = run_script("conservation.py",
                      [FIXTURES / "full_summary.json", out], poisoned_env)
    assert proc.returncode == 0, proc.stderr
    assert_png(out)


def test_conservation_off_criterion_spread_visible(poisoned_env, tmp_path):
    doc = json.loads((FIXTURES / "offcriterion_summary.json").read_text())
    assert doc["off_criterion"] is True
    series = doc["series"]
    spread = [v for v in series["criterion_spread"] if v is not None]
    # conserved quantities stay conserved even off-criterion; what the
    # plot exposes is the criterion spread sitting orders above them
    assert min(spread) > 1e-4
    assert max(series["constraint_drift"]) < 1e-8
    out = tmp_path / "off.png"
    proc = run_script("conservation.py",
                      [FIXTURES / "offcriterion_summary.json", out],
                      poisoned_env)
    assert proc.returncode == 0, proc.stderr
    assert_png(out)


def test_conservation_from_reduced_csv(poisoned_env, tmp_path):
    out = tmp_path / "csv_conservation.png"
    proc = run_script("conservation.py",
                      [FIXTURES / "reduced_trajectory.csv", out], poisoned_env)
    assert proc.returncode == 0, proc.stderr
    assert_png(out)


def test_conservation_rejects_full_csv(poisoned_env, tmp_path):
    proc = run_script("conservation.py",
                      [FIXTURES / "full_trajectory.csv", tmp_path / "x.png"],
                      poisoned_env)
    assert proc.returncode != 0
    assert "summary.json" in proc.stderr


def test_scan_plot(poisoned_env, tmp_path):
    out = tmp_path / "scan.png"
    proc = run_script("scan.py", [FIXTURES / "scan.csv", out], poisoned_env)
    assert proc.returncode == 0, proc.stderr
    assert_png(out)


def test_scan_rejects_wrong_columns(poisoned_env, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    proc = run_script("scan.py", [bad, tmp_path / "x.png"], poisoned_env)
    assert proc.returncode != 0
    assert "column contract" in proc.stderr


def test_scripts_do_not_mention_primary_package():
    for script in ("orbit.py", "conservation.py", "scan.py"):
        source = (PLOTS / script).read_text()
        assert "curvebody" not in source
