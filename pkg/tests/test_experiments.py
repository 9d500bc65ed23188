import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from esi.experiments import (DEFAULTS, EXPERIMENT_IDS, ConfigError, config_from_dict,
                             experiment_config, load_config, run_experiment, scan, synthesize,
                             write_scan_csv)
from esi.signal import norm
from esi.svg import Series, emit_svg, render_svg

SVG_NS = "{http://www.w3.org/2000/svg}"


def test_empty_config_gives_defaults():
    cfg = config_from_dict({})
    assert cfg.offset_r == 1.0 and cfg.m_star == 0.4
    assert cfg.window.t_min == 0.25 and cfg.window.t_max == pytest.approx(0.65)
    assert cfg.window.dt == 0.001 and cfg.window.n == 401
    assert cfg.wavelet.peak_frequency == 40.0 and cfg.wavelet.support_radius == 0.025
    assert cfg.bounds.e_minus == pytest.approx(0.027, abs=5e-4)
    assert cfg.bounds.e_plus == pytest.approx(0.11, abs=5e-3)


def test_coherent_recipe_from_config():
    cfg = config_from_dict({"noise": {"variant": "coherent", "time_shift": 0.1, "eta": 0.3}})
    d_clean, d = synthesize(cfg)
    n = d - d_clean
    assert norm(n) / norm(d_clean) == pytest.approx(0.3, rel=1e-12)
    t = n.times
    assert t[np.argmax(np.abs(n.samples))] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("doc", [
    {"window": {"dt": -0.001}},
    {"window": {"t_min": 0.7}},
    {"lambda": 0},
    {"noise": {"variant": "brown"}},
    {"alpha_fixed": -1},
    {"solver": {"grad_tol": 0}},
    {"scan": {"step": 0}},
    {"bounds": {"e_minus": 0.2, "e_plus": 0.1}},
    {"bounds": {"e_minus": 0.02}},
])
def test_invalid_values_rejected(doc):
    with pytest.raises(ConfigError):
        config_from_dict(doc)


@pytest.mark.parametrize("doc", [{"colour": 1}, {"window": {"width": 1}}, {"bounds": {"snr": 3}}])
def test_unknown_keys_rejected(doc):
    with pytest.raises(ConfigError, match="unknown"):
        config_from_dict(doc)


def test_load_config_diagnostics(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "lambda": 0.1,\n  "seed": \n}\n')
    with pytest.raises(ConfigError, match=r"bad.json:4:1"):
        load_config(p)
    p.write_text(json.dumps({"window": {"dt": -1}}))
    with pytest.raises(ConfigError, match="bad.json"):
        load_config(p)
    p.write_text(json.dumps({"lambda": 0.05}))
    assert load_config(p).lam == 0.05


def test_arrival_outside_window_warns():
    with pytest.warns(RuntimeWarning):
        config_from_dict({"m_star": 0.64})


def test_experiment_ids_and_presets():
    assert EXPERIMENT_IDS == ("1", "2a", "2b", "3", "4", "5", "6", "7")
    assert experiment_config("2").wavelet.center == 0.01
    assert experiment_config("6").solver.grad_tol == 0.01
    assert experiment_config("7").solver.grad_tol == 0.001
    assert experiment_config("6").alpha_fixed is None
    with pytest.raises(ConfigError):
        experiment_config("9")


def test_noise_seed_override():
    a = synthesize(experiment_config("5", {"seed": 1}))[1]
    b = synthesize(experiment_config("5", {"noise": {"seed": 1}}))[1]
    c = synthesize(experiment_config("5", {"seed": 2}))[1]
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_scan_csv_round_trip(tmp_path):
    cfg = experiment_config("3", {"scan": {"m_min": 0.33, "m_max": 0.5, "step": 0.01}})
    rows = scan(synthesize(cfg)[1], cfg)
    p = tmp_path / "scan.csv"
    write_scan_csv(rows, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "m,e_restricted,e_reduced_fwi,j_reduced_esi,grad_j"
    back = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    assert np.array_equal(back, rows)


def test_restricted_fwi_local_minima_regions():
    cfg = experiment_config("1", {"scan": {"step": 0.001}})
    rows = scan(synthesize(cfg)[1], cfg)
    ms, e = rows[:, 0], rows[:, 1]
    for lo, hi in ((0.275, 0.35), (0.45, 0.625)):
        sel = (ms >= lo - 1e-9) & (ms <= hi + 1e-9)
        assert np.ptp(e[sel]) <= 1e-3


def test_svg_single_constant_series():
    text = render_svg([Series(np.arange(5.0), np.ones(5))], "x", "y")
    root = ET.fromstring(text)
    assert root.tag == SVG_NS + "svg"
    lines = root.findall(SVG_NS + "polyline")
    assert len(lines) == 1
    ys = {p.split(",")[1] for p in lines[0].get("points").split()}
    assert len(ys) == 1


def test_svg_two_series_legend(tmp_path):
    x = np.linspace(0, 1, 20)
    p = emit_svg([Series(x, x, "a"), Series(x, x**2, "b")], "x", "y", tmp_path / "f.svg")
    root = ET.parse(p).getroot()
    colors = {pl.get("stroke") for pl in root.findall(SVG_NS + "polyline")}
    assert len(colors) == 2
    legends = [g for g in root.findall(SVG_NS + "g") if g.get("class") == "legend"]
    assert legends and len(legends[0].findall(SVG_NS + "text")) == 2
    assert render_svg([Series(x, x, "a")]) == render_svg([Series(x, x, "a")])
    with pytest.raises(ValueError):
        render_svg([])


def test_experiment1_artifacts(tmp_path):
    res = run_experiment("1", out_dir=tmp_path)
    assert res.passed
    names = {f.name for f in res.files}
    assert {"trace.csv", "scan.csv", "scan.svg", "data.svg", "report.txt"} <= names
    for f in res.files:
        assert f.stat().st_size > 0
        if f.suffix == ".svg":
            ET.parse(f)
    assert "[PASS]" in (tmp_path / "report.txt").read_text()


def test_defaults_not_mutated():
    before = json.dumps(DEFAULTS, sort_keys=True)
    config_from_dict({"window": {"dt": 0.002}, "scan": {"alphas": [1, 2]}})
    assert json.dumps(DEFAULTS, sort_keys=True) == before
