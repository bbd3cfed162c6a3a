import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from cascadelab.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def manifest(d):
    return json.loads((d / "manifest.json").read_text())


def test_shell_steady(tmp_path):
    out = tmp_path / "steady"
    assert run("shell-steady", "--lambda", 2, "--shells", 25, "--e0", 1, "--out", out) == 0
    header, rows = read_csv(out / "shell_steady.csv")
    assert header[:6] == ["n", "ell", "k", "tau", "E", "Pi"]
    assert len(rows) == 25
    slopes = np.array([float(r[header.index("local_slope")]) for r in rows])
    np.testing.assert_allclose(slopes, -5 / 3, atol=1e-12)
    m = manifest(out)
    assert m["status"] == "ok" and m["exit_code"] == 0
    assert m["config"]["lambda"] == 2.0 and m["config"]["shells"] == 25
    assert m["derived"]["alpha"] == pytest.approx(2 ** (-2 / 3))
    assert m["derived"]["beta"] == pytest.approx(2 ** (2 / 3))
    assert m["outputs"] == [{"file": "shell_steady.csv", "rows": 25, "columns": header}]
    assert "wall_clock_s" in m and "version" in m


def test_csv_round_trip_precision(tmp_path):
    run("shell-steady", "--lambda", 3, "--shells", 5, "--out", tmp_path)
    header, rows = read_csv(tmp_path / "shell_steady.csv")
    tau = [float(r[header.index("tau")]) for r in rows]
    from cascadelab import shell_model as sm

    assert tau == sm.shell_scales(sm.CascadeParams(lam=3.0, n_shells=5)).tau.tolist()


def test_keps_constants_table(tmp_path):
    assert run("keps-constants", "--lambda", 2.71828, "--ck", 1.5, "--out", tmp_path) == 0
    header, rows = read_csv(tmp_path / "keps_constants.csv")
    assert header == ["name", "formula", "boxed", "abs_delta", "note"]
    table = {r[0]: r for r in rows}
    assert float(table["C_2eps"][1]) == pytest.approx(2.0114, abs=1e-4)
    assert table["sigma_k_final"][1] == ""
    assert manifest(tmp_path)["derived"]["C_K"] == 1.5


def test_fit_slope_on_exact_file(tmp_path):
    k = np.arange(1, 33, dtype=float)
    src = tmp_path / "spectrum.csv"
    src.write_text("k,E\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(k, k ** (-5 / 3))))
    assert run("fit-slope", "--input", src, "--kmin", 2, "--kmax", 16, "--out", tmp_path / "fit") == 0
    header, rows = read_csv(tmp_path / "fit" / "fit_slope.csv")
    assert float(rows[0][0]) == pytest.approx(-1.6667, abs=1e-4)
    assert int(rows[0][3]) == 15


def test_spectrum_integrals_cli(tmp_path):
    k = np.linspace(1, 64, 4001)
    src = tmp_path / "s.csv"
    src.write_text("k,E\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(k, k ** (-5 / 3))))
    assert run("spectrum-integrals", "--input", src, "--nu", 0, "--out", tmp_path / "o") == 0
    _, rows = read_csv(tmp_path / "o" / "spectrum_integrals.csv")
    assert float(rows[0][0]) == pytest.approx(1.40625, abs=1e-4)
    assert float(rows[0][1]) == 0.0


def test_discrepancy_report_flags(tmp_path):
    runs = tmp_path / "runs"
    assert run("keps-constants", "--out", runs / "keps") == 0
    assert run("shell-steady", "--out", runs / "steady") == 0
    assert run("discrepancy-report", "--dir", runs, "--out", tmp_path / "rep") == 0
    rep = json.loads((tmp_path / "rep" / "discrepancy_report.json").read_text())
    rows = {r["claim_id"]: r for r in rep["rows"]}
    assert rows["C_2eps"]["measured"] == pytest.approx(2.0114, abs=1e-4)
    assert rows["C_2eps"]["reference"] == 1.92
    assert rows["C_2eps"]["verdict"] == "inconsistent (|Δ|=0.091 > 0.02)"
    assert rows["sigma_eps"]["consistent"] is False
    assert rows["k41_shell_slope"]["verdict"].startswith("consistent")
    header, _ = read_csv(tmp_path / "rep" / "discrepancy_report.csv")
    assert header[0] == "claim_id"


def test_discrepancy_report_empty_dir(tmp_path):
    (tmp_path / "empty").mkdir()
    assert run("discrepancy-report", "--dir", tmp_path / "empty", "--out", tmp_path / "rep") == 2
    assert manifest(tmp_path / "rep")["status"] == "error"


def test_unknown_subcommand_and_flag(capsys):
    with pytest.raises(SystemExit) as e:
        main(["warp-drive"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["shell-steady", "--out", "x", "--bogus", "1"])
    assert e.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"lambda": 3.0, "shells": 7, "e0": 2.0}))
    assert run("shell-steady", "--config", cfg, "--shells", 9, "--out", tmp_path / "o") == 0
    m = manifest(tmp_path / "o")
    assert m["config"]["lambda"] == 3.0
    assert m["config"]["shells"] == 9
    assert m["config"]["e0"] == 2.0


@pytest.mark.parametrize(
    "argv",
    [
        ["shell-steady", "--lambda", "0.5"],
        ["shell-sim", "--shells", "20", "--dt", "0.001"],
        ["shell-criteria", "--nu", "0"],
        ["burgers", "--grid", "100"],
        ["keps-decay", "--c2eps", "0.9"],
        ["transient", "--t-star", "-1"],
    ],
)
def test_validation_failures_leave_no_numeric_output(tmp_path, argv):
    out = tmp_path / "bad"
    assert run(*argv, "--out", out) == 2
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json"]
    m = manifest(out)
    assert m["status"] == "error" and m["exit_code"] == 2 and m["error"]["message"]


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"lambda": "two"}))
    assert run("shell-steady", "--config", cfg, "--out", tmp_path / "o") == 2
    cfg.write_text(json.dumps({"colour": 1}))
    assert run("shell-steady", "--config", cfg, "--out", tmp_path / "o") == 2
    cfg.write_text("{not json")
    assert run("shell-steady", "--config", cfg, "--out", tmp_path / "o") == 2
    assert manifest(tmp_path / "o")["status"] == "error"


def test_instability_exit_code(tmp_path):
    out = tmp_path / "boom"
    assert run("tao", "--shells", 10, "--t-end", 50, "--dt", 0.01, "--out", out) == 3
    m = manifest(out)
    assert m["error"]["type"] == "InstabilityError"
    assert m["error"]["suggested_dt"] is not None
    assert [p.name for p in out.iterdir()] == ["manifest.json"]


def test_io_failure_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run("shell-steady", "--out", blocker / "sub") == 1
    assert run("fit-slope", "--input", tmp_path / "missing.csv", "--out", tmp_path / "o") == 1
    assert manifest(tmp_path / "o")["error"]["type"] == "FileNotFoundError"


def test_determinism(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"grid": 64, "t_end": 0.3, "noise": 0.2, "seed": 7, "snapshots": True}))
    for name in ("a", "b"):
        assert run("burgers", "--config", cfg, "--out", tmp_path / name) == 0
    for f in ("burgers_history.csv", "burgers_snapshots.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_json_format(tmp_path):
    assert run("transient", "--samples", 5, "--format", "json", "--out", tmp_path) == 0
    doc = json.loads((tmp_path / "transient.json").read_text())
    assert doc["columns"] == ["t", "factor", "U"]
    assert len(doc["rows"]) == 5
    assert doc["rows"][-1][1] == 1.0


@pytest.mark.parametrize(
    "command",
    ["shell-sim", "shell-analytic", "shell-criteria", "burgers", "tao", "tao-compare", "closure-spectrum", "keps-decay"],
)
def test_every_command_runs_with_defaults(tmp_path, command):
    assert run(command, "--out", tmp_path) == 0
    m = manifest(tmp_path)
    assert m["outputs"]
    for entry in m["outputs"]:
        header, rows = read_csv(tmp_path / entry["file"])
        assert header == entry["columns"]
        assert len(rows) == entry["rows"]
    assert len(list(tmp_path.rglob("manifest.json"))) == 1


def test_closure_spectrum_derived(tmp_path):
    assert run("closure-spectrum", "--nu", 1e-3, "--out", tmp_path) == 0
    d = manifest(tmp_path)["derived"]
    assert d["crossover_k"] == pytest.approx(120**0.75, rel=1e-14)
    assert d["inertial_slope_corrected"] == pytest.approx(-5 / 3, abs=0.02)


def test_sweep_parallel(tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"runs": [
        {"command": "shell-steady", "name": "s2", "lambda": 2.0},
        {"command": "shell-steady", "name": "s3", "lambda": 3.0},
        {"command": "keps-constants"},
        {"command": "shell-steady", "name": "bad", "lambda": 0.5},
    ]}))
    assert run("sweep", "--config", cfg, "--jobs", 2, "--out", tmp_path / "sw") == 2
    for name in ("s2", "s3", "002_keps-constants", "bad"):
        assert (tmp_path / "sw" / name / "manifest.json").is_file()
    assert manifest(tmp_path / "sw" / "s3")["config"]["lambda"] == 3.0
    summary = json.loads((tmp_path / "sw" / "sweep_summary.json").read_text())
    assert [s["exit_code"] for s in summary] == [0, 0, 0, 2]
    assert run("discrepancy-report", "--dir", tmp_path / "sw", "--out", tmp_path / "rep") == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "cascadelab", "transient", "--out", str(tmp_path)], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "transient.csv").is_file()
