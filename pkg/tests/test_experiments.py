"""Stability harness, fig4 sweep, and the CLI wiring."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from reebsmooth.cli import main
from reebsmooth.errors import ValidationError
from reebsmooth.experiments import (
    ExperimentConfig,
    fig4_sweep,
    load_fig4_fixture,
    report_to_json,
    run_stability,
)


def small_config(**over):
    base = {"mode": "dtm", "trials": 4, "seed": 5, "meshes": ("circle",)}
    base.update(over)
    return ExperimentConfig.from_dict(base)


def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict({"trials": 0})
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict({"mode": "other"})
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict({"mass": 1.5})
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict({"meshes": ("nonexistent_mesh",)})
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict({"unknown_key": 1})


def test_reports_byte_identical_across_thread_counts():
    a = report_to_json(run_stability(small_config(threads=1)))
    b = report_to_json(run_stability(small_config(threads=3)))
    assert a == b


def test_reports_deterministic_across_runs():
    cfg = small_config(mode="kernel", trials=3)
    assert report_to_json(run_stability(cfg)) == report_to_json(run_stability(cfg))


def test_zero_perturbation_gives_zero_lower_bound():
    # g = f and nu = mu: identical graphs, LB exactly 0 <= tolerance
    for mode in ("dtm", "kernel", "range"):
        cfg = small_config(mode=mode, trials=2, bump_amplitude=0.0, jitter=0.0)
        report = run_stability(cfg)
        assert report["all_pass"]
        for t in report["trials"]:
            assert t["lower_bound"] == 0.0


def test_all_modes_pass_smoke():
    for mode in ("dtm", "kernel", "range"):
        report = run_stability(small_config(mode=mode, trials=3, meshes=("circle", "rig")))
        assert report["all_pass"], report
        assert report["violations"] == []
        for t in report["trials"]:
            assert t["lower_bound"] <= t["upper_bound"] + 1e-9


def test_report_schema_fields():
    report = run_stability(small_config(trials=2))
    assert report["version"] == 1
    assert "threads" not in report["config"]
    assert set(report) >= {"version", "config", "trials", "violations", "max_excess", "all_pass"}
    t = report["trials"][0]
    assert set(t) >= {"trial", "mesh", "lower_bound", "upper_bound", "pass"}


def test_fig4_fixture_loads_and_crossover_holds():
    X, f, mu = load_fig4_fixture()
    assert X.n_vertices == 78  # welded loop joints share vertices
    assert mu.weights.sum() == pytest.approx(1.0, abs=1e-12)
    report = fig4_sweep(scales=[0.25, 2.25, 4.0])
    assert report["rows"][0]["dtm"]["betti1"] == 3  # tiny scale keeps all loops
    assert report["crossover_scales"]
    assert report["qualitative_pass"]


def test_fig4_large_scale_collapses_to_trees():
    report = fig4_sweep(scales=[40.0])
    row = report["rows"][0]
    assert row["dtm"]["betti1"] == 0
    assert row["kernel"]["betti1"] == 0


# -- CLI ----------------------------------------------------------------------


def _write_circle(tmp_path):
    from reebsmooth.fileio import complex_to_dict, dump_json
    from reebsmooth.meshes import circle_complex

    X, f = circle_complex(16)
    path = tmp_path / "circle.json"
    dump_json(complex_to_dict(X, field=f), path)
    return path


def test_cli_build_writes_graph(tmp_path, capsys):
    mesh = _write_circle(tmp_path)
    out = tmp_path / "g.json"
    assert main(["build", "--in", str(mesh), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["graph"]["nodes"]) == 2


def test_cli_build_missing_file_exit_2(tmp_path, capsys):
    assert main(["build", "--in", str(tmp_path / "nope.off")]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_build_field_expression(tmp_path):
    mesh = _write_circle(tmp_path)
    out = tmp_path / "g.json"
    assert main(["build", "--in", str(mesh), "--field", "x + 0*y", "--out", str(out)]) == 0
    vals = sorted(n["value"] for n in json.loads(out.read_text())["graph"]["nodes"])
    assert vals[0] == pytest.approx(-1.0)
    assert vals[-1] == pytest.approx(1.0)


def test_cli_smooth_interleaving_report(tmp_path):
    mesh = _write_circle(tmp_path)
    mu = tmp_path / "mu.csv"
    rows = [f"{float(np.cos(t))!r},{float(np.sin(t))!r},1.0" for t in np.linspace(0, 6.28, 20)]
    mu.write_text("\n".join(rows) + "\n")
    out = tmp_path / "s.json"
    rc = main(
        ["smooth", "--in", str(mesh), "--eps", "0.3", "--dtm", "0.2",
         "--measure", str(mu), "--out", str(out)]
    )
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["interleaving"]["function_preservation"]["passed"]
    assert payload["interleaving"]["commutativity"]["passed"]


def test_cli_smooth_needs_factor(tmp_path, capsys):
    mesh = _write_circle(tmp_path)
    assert main(["smooth", "--in", str(mesh)]) == 3


def test_cli_range_graph_in_unit_interval(tmp_path):
    mesh = _write_circle(tmp_path)
    mu = tmp_path / "mu1d.csv"
    mu.write_text("-1.5,1\n0.0,1\n1.5,1\n")
    out = tmp_path / "r.json"
    assert main(["range", "--in", str(mesh), "--measure", str(mu), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    vals = [n["value"] for n in payload["graph"]["nodes"]]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert payload["cdf"]["lipschitz_bound"] > 0


def test_cli_stability_runs_and_writes_report(tmp_path):
    out = tmp_path / "report.json"
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("trials = 3\nmeshes = [\"circle\"]\n")
    rc = main(
        ["stability", "--mode", "kernel", "--trials", "99", "--seed", "2",
         "--config", str(cfg), "--out", str(out)]
    )
    assert rc == 0
    report = json.loads(out.read_text())
    assert len(report["trials"]) == 3  # config file overrides the flag
    assert report["all_pass"]


def test_cli_config_json_form(tmp_path):
    out = tmp_path / "report.json"
    cfg = tmp_path / "exp.json"
    cfg.write_text('{"trials": 2, "meshes": ["circle"], "seed": 9}')
    rc = main(["stability", "--trials", "50", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    assert len(json.loads(out.read_text())["trials"]) == 2


def test_cli_fig4_report_and_dot(tmp_path):
    out = tmp_path / "fig4.json"
    rc = main(["fig4", "--scales", "0.5,2.25", "--out", str(out), "--dot", str(tmp_path / "f4")])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["version"] == 1
    assert (tmp_path / "f4.dtm.dot").exists()
    assert (tmp_path / "f4.kernel.dot").exists()


def test_cli_entry_point_installed():
    proc = subprocess.run(
        ["reebsmooth", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "build" in proc.stdout and "stability" in proc.stdout


def test_reeb_threads_env_validation(tmp_path):
    code = (
        "from reebsmooth.experiments import ExperimentConfig, _worker_count; "
        "print(_worker_count(ExperimentConfig()))"
    )
    env = dict(os.environ, REEB_THREADS="not_a_number")
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert proc.returncode != 0
    assert "REEB_THREADS" in proc.stderr
    env["REEB_THREADS"] = "2"
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert proc.stdout.strip() == "2"
