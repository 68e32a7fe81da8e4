"""Driver behavior: determinism, exit codes, config handling, report formats."""

import json

import pytest

import nctorus.symmetry as symmetry
from nctorus.cli import (
    EXIT_INVARIANT,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    load_config_file,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(trunc_box=0).validate()
    with pytest.raises(ValueError):
        RunConfig(grid_points=4000).validate()
    with pytest.raises(ValueError):
        RunConfig(theta=1.5).validate()


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment defaults\ntheta = 0.3\ntrunc_box = 8\nseed = 11\n")
    loaded = load_config_file(str(cfg))
    assert loaded == {"theta": 0.3, "trunc_box": 8, "seed": 11}
    code, out = run_cli(capsys, "--config", str(cfg), "--theta", "0.25",
                        "--trunc", "6", "instanton")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["inputs"]["theta"] == 0.25  # flag wins
    assert data["inputs"]["seed"] == 11     # file wins over default


def test_config_file_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("not_a_key = 3\n")
    with pytest.raises(ValueError):
        load_config_file(str(cfg))


def test_instanton_report_values(capsys):
    code, out = run_cli(capsys, "--trunc", "12", "instanton")
    assert code == EXIT_OK
    data = json.loads(out)
    assert abs(data["residuals"]["trace"] - 0.2) < 1e-6
    assert abs(data["chern"] + 1.0) < 1e-4
    boxes = [row["box"] for row in data["convergence"]]
    assert boxes == sorted(boxes)


def test_instanton_deterministic_output(capsys):
    _, out1 = run_cli(capsys, "--trunc", "8", "instanton")
    _, out2 = run_cli(capsys, "--trunc", "8", "instanton")
    assert out1 == out2


def test_instanton_writes_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, out = run_cli(capsys, "--trunc", "6", "--out", str(path), "instanton")
    assert code == EXIT_OK
    assert out == ""
    data = json.loads(path.read_text())
    assert data["model"] == "instanton"


def test_verify_all_passes_and_is_deterministic(capsys):
    code1, out1 = run_cli(capsys, "verify", "--suite", "algebra")
    code2, out2 = run_cli(capsys, "verify", "--suite", "algebra")
    assert code1 == code2 == EXIT_OK
    assert out1 == out2


def test_verify_symmetry_fails_with_corrupted_phase(capsys, monkeypatch):
    import cmath
    import math

    def corrupted(theta, m, n, a, b):
        # non-additive extra twist: breaks the group-action law
        return cmath.exp(2j * math.pi * theta * (m * b - n * a + m * n))

    monkeypatch.setattr(symmetry, "_ad_phase", corrupted)
    code, out = run_cli(capsys, "verify", "--suite", "symmetry")
    assert code == EXIT_INVARIANT
    data = json.loads(out)
    failed = {row["name"] for row in data["convergence"] if not row["passed"]}
    assert "group_action_law" in failed


def test_sweep_trunc_monotone_defects(capsys):
    code, out = run_cli(capsys, "--format", "csv", "sweep",
                        "--param", "trunc", "--values", "6,10,14")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    idx = header.index("idempotency_defect")
    defects = [float(row.split(",")[idx]) for row in lines[1:]]
    assert defects == sorted(defects, reverse=True)


def test_sweep_lambda_chern_constant(capsys):
    code, out = run_cli(capsys, "--trunc", "12", "sweep",
                        "--param", "lambda", "--values=-1,0,1")
    assert code == EXIT_OK
    data = json.loads(out)
    for row in data["convergence"]:
        assert abs(row["chern"] + 1.0) < 1e-4


def test_sweep_records_row_failures_and_continues(capsys):
    # theta outside (0,1) in one row: failure recorded, sweep keeps going
    code, out = run_cli(capsys, "--trunc", "8", "sweep",
                        "--param", "theta", "--values", "0.2,1.7")
    assert code == EXIT_NUMERICAL
    data = json.loads(out)
    assert data["convergence"][0]["error"] == ""
    assert data["convergence"][1]["error"] != ""


def test_models_chiral(capsys):
    code, out = run_cli(capsys, "models", "--model", "chiral", "--mn", "1,2")
    assert code == EXIT_OK
    data = json.loads(out)
    assert abs(data["energy"] - 4 * 3.141592653589793**2 * 5) < 1e-9
    assert data["residuals"]["ad_orbit_in_gauge_orbit"] is True


def test_models_usage_errors(capsys):
    assert run_cli(capsys, "models", "--model", "endo",
                   "--matrix", "1,0,0,-1")[0] == EXIT_USAGE
    assert run_cli(capsys, "models", "--model", "su2",
                   "--matrix", "1,0,0,1")[0] == EXIT_USAGE
    assert run_cli(capsys, "models", "--model", "chiral")[0] == EXIT_USAGE
    assert run_cli(capsys, "sweep", "--param", "trunc", "--values", "")[0] == EXIT_USAGE


def test_models_endo_and_su2_pairings(capsys):
    code, out = run_cli(capsys, "--theta", "0.6180339887498949",
                        "models", "--model", "endo", "--matrix", "1,1,0,1")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["residuals"]["max_abs_pairing"] < 1e-10
    assert len(data["convergence"]) >= 10

    code, out = run_cli(capsys, "--theta", "0.6180339887498949",
                        "models", "--model", "su2", "--matrix", "1,0,2,0")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["residuals"]["max_abs_pairing"] < 1e-10
