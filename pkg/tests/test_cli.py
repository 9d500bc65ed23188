import json

import pytest

from esi.cli import EXIT_IO, EXIT_NONCONVERGENCE, EXIT_VALIDATION, main
from esi.signal import read_trace_csv


def test_synth_and_invert_round_trip(tmp_path, capsys):
    assert main(["synth", "--out", str(tmp_path), "--config", str(_cfg(tmp_path))]) == 0
    trace = tmp_path / "trace.csv"
    assert read_trace_csv(trace).grid.n == 401
    out = tmp_path / "inv"
    assert main(["invert", "--data", str(trace), "--discrepancy", "--out", str(out)]) == 0
    text = (out / "report.txt").read_text()
    assert "epsilon" in text and (out / "log.csv").exists()
    m = float(text.split("m = ")[1].split()[0])
    assert abs(m - 0.4) < 0.057


def _cfg(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"noise": {"variant": "coherent", "time_shift": 0.1, "eta": 0.3}}))
    return p


def test_invert_fixed_alpha(tmp_path, capsys):
    assert main(["invert", "--alpha", "1", "--config", str(_cfg(tmp_path)),
                 "--out", str(tmp_path)]) == 0
    assert "m = 0.401" in capsys.readouterr().out


def test_scan_with_grid(tmp_path):
    assert main(["scan", "--m-grid", "0.3:0.5:0.01", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "scan.csv").read_text().splitlines()
    assert len(lines) == 22


def test_flags_override_file(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"lambda": 0.05}))
    assert main(["invert", "--alpha", "1", "--lambda", "0.082", "--config", str(p),
                 "--out", str(tmp_path)]) == 0
    assert "lambda=0.082" in (tmp_path / "report.txt").read_text()


def test_bounds_report(tmp_path, capsys):
    assert main(["bounds", "--mu", "0.025", "--eta", "0.3", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "0.081967" in out and (tmp_path / "report.txt").read_text() == out


def test_experiment_subcommand(tmp_path, capsys):
    assert main(["experiment", "2b", "--out", str(tmp_path)]) == 0
    assert "[PASS]" in capsys.readouterr().out


def test_validation_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"window": {"dt": -0.001}}')
    assert main(["synth", "--config", str(p), "--out", str(tmp_path)]) == EXIT_VALIDATION
    p.write_text("{not json")
    assert main(["synth", "--config", str(p), "--out", str(tmp_path)]) == EXIT_VALIDATION
    assert "bad.json:1:" in capsys.readouterr().err


def test_io_exit_code(tmp_path):
    assert main(["synth", "--config", str(tmp_path / "missing.json")]) == EXIT_IO


def test_nonconvergence_exit_code(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"solver": {"max_outer_iters": 1, "grad_tol": 1e-30}}))
    assert main(["invert", "--discrepancy", "--config", str(p),
                 "--out", str(tmp_path)]) == EXIT_NONCONVERGENCE


def test_argument_errors():
    with pytest.raises(SystemExit):
        main(["scan", "--m-grid", "0.3-0.5"])
    with pytest.raises(SystemExit):
        main(["invert", "--alpha", "1", "--discrepancy"])
