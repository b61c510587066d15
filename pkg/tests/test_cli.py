import csv
import io
import json
import shutil
import subprocess

import pytest

from propagation_paradox.cli import EXIT_CHECK_FAILED, EXIT_CONFIG, main

LIGHT = ["--grid-n", "65536", "--x-extent", "200", "--truncation-threshold", "1e-3", "--convergence-tol", "1e-4"]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_is_deterministic(capsys):
    first = run_cli(capsys, "run", *LIGHT)
    second = run_cli(capsys, "run", *LIGHT)
    assert first[0] == second[0] == 0
    assert first[1].encode() == second[1].encode()
    doc = json.loads(first[1])
    assert set(doc) == {"config", "scale_convention", "results", "diagnostics"}
    assert doc["results"]["verdict"] == "violated"
    assert doc["results"]["BL_over_2pi_hbar"] == pytest.approx(0.024)


def test_run_optimal(capsys):
    code, out, _ = run_cli(capsys, "run", *LIGHT, "--bl", "optimal")
    assert code == 0
    assert json.loads(out)["results"]["s"] == pytest.approx(0.1547005, abs=1e-7)


@pytest.mark.parametrize("argv", [
    ["run", "--grid-n", "12"],
    ["run", "--grid-n", "1000"],
    ["run", "--bl", "-1"],
    ["run", "--bl", "abc"],
    ["run", "--bl", "1e-6"],
    ["run", "--convergence-tol", "0"],
])
def test_configuration_errors_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == EXIT_CONFIG
    assert "configuration error" in err and out == ""


def test_sweep_steps_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--steps", "1"])
    assert info.value.code == 2


def test_out_file(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    assert main(["sweep", "--steps", "3", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert path.read_text().count("\n") == 4


def test_sweep_csv(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--steps", "5")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6
    assert rows[0] == ["u", "s", "analytic_bound", "numeric_defect", "numeric_PM"]


def test_figure_csv(capsys):
    code, out, _ = run_cli(capsys, "figure", *LIGHT)
    rows = list(csv.reader(io.StringIO(out)))
    header, body = rows[0], rows[1:]
    assert code == 0
    assert header[0] == "x_over_L" and len(body) >= 2000
    assert all(len(r) == len(header) for r in body)
    x = [float(r[0]) for r in body]
    assert x == sorted(x) and min(x) >= -12 and max(x) <= 12


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bl_over_2pi_hbar": 0.03, "grid_n": 65536, "x_extent_over_L": 200,
                               "truncation_threshold": 1e-3, "convergence_tol": 1e-4}))
    code, out, _ = run_cli(capsys, "run", "--config", str(cfg), "--bl", "0.02")
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["bl_over_2pi_hbar"] == 0.02
    assert doc["config"]["grid_n"] == 65536


def test_config_file_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gridn": 4}))
    assert run_cli(capsys, "run", "--config", str(cfg))[0] == EXIT_CONFIG


@pytest.fixture(scope="module")
def verify_output(tmp_path_factory):
    path = tmp_path_factory.mktemp("verify") / "out.txt"
    code = main(["verify", "--out", str(path)])
    return code, path.read_text().splitlines()


def test_verify_exit_code_reflects_checks(verify_output):
    code, lines = verify_output
    checks = [l for l in lines if l.startswith("[")]
    assert len(checks) >= 12
    all_pass = all(l.startswith("[PASS]") for l in checks)
    assert code == (0 if all_pass else EXIT_CHECK_FAILED)
    assert lines[-1].endswith("checks passed")


def test_verify_fails_with_loose_convergence_tolerance(capsys):
    # a tolerance this loose cannot certify any numeric check
    code, out, _ = run_cli(capsys, "verify", "--convergence-tol", "1")
    assert code == EXIT_CHECK_FAILED
    for check in ("3b", "6b", "6c", "7 ", "8b"):
        assert f"[FAIL] {check}" in out


@pytest.mark.skipif(shutil.which("propagation-paradox") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["propagation-paradox", "--version"], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "0.1.0"
