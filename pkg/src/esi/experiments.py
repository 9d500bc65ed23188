"""Configuration, landscape scans and the reference experiments.

Each experiment is a named preset layered over the default setup
(1 km offset, target slowness 0.4 s/km, record window [0.25, 0.65] s at
1 ms, 40 Hz Ricker truncated at 25 ms). `run_experiment` synthesizes the
data, scans the objectives, optionally runs the discrepancy algorithm and
truncation, evaluates the experiment's checks, and writes CSV, SVG and a
text report.
"""

from __future__ import annotations

import copy
import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds as bnd
from .forward import Geometry, SlownessInterval, forward_analytic, forward_sampled
from .objectives import (e_reduced_fwi, e_restricted, grad_j_reduced, j_reduced,
                         solve_w_alpha)
from .optimize import (DiscrepancyBounds, SolverConfig, brent_zero, discrepancy_solve,
                       find_brackets, truncate_and_report, write_log_csv)
from .signal import AnalyticWavelet, NoiseSpec, TimeGrid, Trace, make_noise, write_trace_csv
from .svg import Series, emit_svg

__all__ = [
    "ConfigError",
    "ScanRequest",
    "ExperimentConfig",
    "EXPERIMENT_IDS",
    "DEFAULTS",
    "config_from_dict",
    "load_config",
    "experiment_config",
    "synthesize",
    "scan",
    "write_scan_csv",
    "stationary_points",
    "Check",
    "ExperimentResult",
    "run_experiment",
]


class ConfigError(ValueError):
    """Invalid configuration document or values."""


DEFAULTS = {
    "offset_r": 1.0,
    "m_star": 0.4,
    "window": {"t_min": 0.25, "t_max": 0.65, "dt": 0.001},
    "wavelet": {"peak_frequency": 40.0, "center": 0.0, "support_radius": 0.025},
    "noise": {"variant": "none", "eta": 0.0, "time_shift": 0.1, "seed": None},
    "lambda": 0.025,
    "bounds": {"snr_target": 3.0, "gamma": 0.49},
    "solver": {"m_min": 0.33, "m_max": 0.65, "grad_tol": 0.01, "max_outer_iters": 100,
               "max_alpha_updates_per_cycle": 25, "scan_points_for_bracketing": 129,
               "alpha_rule": "basic"},
    "alpha_fixed": 1.0,
    "m_initial": 0.343,
    "seed": 0,
    "scan": {"m_min": 0.25, "m_max": 0.65, "step": 0.0005, "alphas": []},
}

_COHERENT_03 = {"variant": "coherent", "time_shift": 0.1, "eta": 0.3}
_DISCREPANCY = {"alpha_fixed": None, "lambda": 0.082}

PRESETS = {
    "1": {},
    "2a": {"wavelet": {"center": 0.01}, "lambda": 0.1, "m_initial": 1.0 / 3.0},
    "2b": {"wavelet": {"center": 0.05}, "lambda": 0.1, "m_initial": 1.0 / 3.0},
    "3": {"noise": _COHERENT_03},
    "4": {"noise": {"variant": "coherent", "time_shift": 0.1, "eta": 1.0}},
    "5": {"noise": {"variant": "filtered_random", "eta": 1.0}},
    "6": {"noise": _COHERENT_03, **_DISCREPANCY,
          "solver": {"grad_tol": 0.01, "alpha_rule": "doubling"},
          "scan": {"alphas": [0.1, 1.0, 10.0, 100.0]}},
    "7": {"noise": {"variant": "filtered_random", "eta": 0.3}, **_DISCREPANCY,
          "solver": {"grad_tol": 0.001, "alpha_rule": "doubling"}},
}
EXPERIMENT_IDS = tuple(PRESETS)


@dataclass(frozen=True)
class ScanRequest:
    m_grid: np.ndarray
    objectives: tuple = ("e_restricted", "e_reduced_fwi", "j_reduced_esi")
    alpha_list: tuple = (1.0,)

    @classmethod
    def uniform(cls, m_min, m_max, step, **kw):
        if not step > 0:
            raise ConfigError("scan step must be positive")
        if not 0 < m_min <= m_max:
            raise ConfigError(f"bad scan range [{m_min}, {m_max}]")
        n = int(math.floor((m_max - m_min) / step + 1e-9)) + 1
        return cls(m_min + step * np.arange(n), **kw)


@dataclass(frozen=True)
class ExperimentConfig:
    offset_r: float
    m_star: float
    window: TimeGrid
    wavelet: AnalyticWavelet
    noise: NoiseSpec
    lam: float
    bounds: DiscrepancyBounds
    solver: SolverConfig
    alpha_fixed: float | None
    m_initial: float
    seed: int
    scan: ScanRequest
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def geometry(self):
        return Geometry(self.offset_r, self.window)


def _merge(base, over, where=""):
    out = copy.deepcopy(base)
    for key, val in over.items():
        if key not in base:
            raise ConfigError(f"unknown key {where}{key!r}")
        if isinstance(base[key], dict) and key not in ("bounds",):
            if not isinstance(val, dict):
                raise ConfigError(f"{where}{key} must be an object")
            out[key] = _merge(base[key], val, f"{where}{key}.")
        else:
            out[key] = copy.deepcopy(val)
    return out


def _bounds_from(obj):
    allowed = {"snr_target", "gamma", "e_minus", "e_plus"}
    extra = set(obj) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in bounds: {sorted(extra)}")
    if "e_minus" in obj or "e_plus" in obj:
        if not ("e_minus" in obj and "e_plus" in obj):
            raise ConfigError("bounds needs both e_minus and e_plus")
        return DiscrepancyBounds(float(obj["e_minus"]), float(obj["e_plus"]))
    return DiscrepancyBounds.from_target_snr(float(obj.get("snr_target", 3.0)),
                                             float(obj.get("gamma", 0.49)))


def config_from_dict(doc, base=None):
    """Build a validated config from a (partial) JSON-style mapping.

    Missing keys come from `base` (a full mapping, `DEFAULTS` if omitted);
    unknown keys raise `ConfigError`.
    """
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    merged = _merge(DEFAULTS if base is None else base, doc)
    try:
        win = merged["window"]
        window = TimeGrid.from_bounds(float(win["t_min"]), float(win["t_max"]),
                                      float(win["dt"]))
        wavelet = AnalyticWavelet(**{k: float(v) for k, v in merged["wavelet"].items()})
        noise_doc = dict(merged["noise"])
        noise_seed = noise_doc.pop("seed")
        seed = int(merged["seed"] if noise_seed is None else noise_seed)
        noise = NoiseSpec(variant=noise_doc["variant"], eta=float(noise_doc["eta"]),
                          time_shift=float(noise_doc["time_shift"]), seed=seed)
        s = merged["solver"]
        solver = SolverConfig(
            search_interval=SlownessInterval(float(s["m_min"]), float(s["m_max"])),
            grad_tol=float(s["grad_tol"]), max_outer_iters=int(s["max_outer_iters"]),
            max_alpha_updates_per_cycle=int(s["max_alpha_updates_per_cycle"]),
            scan_points_for_bracketing=int(s["scan_points_for_bracketing"]),
            alpha_rule=str(s["alpha_rule"]))
        alpha_fixed = merged["alpha_fixed"]
        if alpha_fixed is not None:
            alpha_fixed = float(alpha_fixed)
            if alpha_fixed < 0:
                raise ConfigError("alpha_fixed must be nonnegative")
        sc = merged["scan"]
        alphas = tuple(float(a) for a in sc["alphas"]) or (
            1.0 if alpha_fixed is None else alpha_fixed,)
        scan_req = ScanRequest.uniform(float(sc["m_min"]), float(sc["m_max"]),
                                       float(sc["step"]), alpha_list=alphas)
        cfg = ExperimentConfig(
            offset_r=float(merged["offset_r"]), m_star=float(merged["m_star"]),
            window=window, wavelet=wavelet, noise=noise, lam=float(merged["lambda"]),
            bounds=_bounds_from(merged["bounds"]), solver=solver, alpha_fixed=alpha_fixed,
            m_initial=float(merged["m_initial"]), seed=seed, scan=scan_req, raw=merged)
        cfg.geometry  # validates offset
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    if not cfg.lam > 0 or not cfg.m_star > 0:
        raise ConfigError("lambda and m_star must be positive")
    arrival = cfg.m_star * cfg.offset_r + cfg.wavelet.center
    mu = cfg.wavelet.support_radius
    if arrival - mu < window.t_min or arrival + mu > window.t_max:
        warnings.warn("target arrival is not contained in the record window",
                      RuntimeWarning, stacklevel=2)
    return cfg


def load_config(path, base=None):
    """Parse a JSON config file; errors carry line/column or field names."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return config_from_dict(doc, base)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def normalize_id(exp_id):
    key = str(exp_id).strip().lower()
    key = {"2": "2a"}.get(key, key)
    if key not in PRESETS:
        raise ConfigError(f"unknown experiment {exp_id!r}; choose from {EXPERIMENT_IDS}")
    return key


def experiment_defaults(exp_id):
    """Full config mapping for a reference experiment."""
    return _merge(DEFAULTS, PRESETS[normalize_id(exp_id)])


def experiment_config(exp_id, overrides=None):
    return config_from_dict(overrides or {}, experiment_defaults(exp_id))


def synthesize(cfg):
    """Return ``(d_clean, d)`` for the configured target and noise."""
    geom = cfg.geometry
    d_clean = forward_analytic(cfg.m_star, cfg.wavelet, geom)
    filt = AnalyticWavelet(cfg.wavelet.peak_frequency, 0.0, cfg.wavelet.support_radius)
    return d_clean, d_clean + make_noise(cfg.noise, d_clean, filt)


SCAN_FIELDS = ["m", "e_restricted", "e_reduced_fwi", "j_reduced_esi", "grad_j"]


def scan(d, cfg, alpha=None, m_grid=None):
    """Evaluate every landscape column at each slowness of the scan grid."""
    geom = cfg.geometry
    alpha = cfg.scan.alpha_list[0] if alpha is None else alpha
    ms = cfg.scan.m_grid if m_grid is None else np.asarray(m_grid, float)
    rows = []
    for m in ms:
        m = float(m)
        rec = j_reduced(m, alpha, d, geom)
        rows.append((m, e_restricted(m, cfg.wavelet, d, geom),
                     e_reduced_fwi(m, d, cfg.lam, geom), rec.j, rec.dj_dm))
    return np.array(rows)


def write_scan_csv(rows, path, header=SCAN_FIELDS):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.17g}" for v in row])


def stationary_points(d, alpha, geom, m_grid, tol=1e-13):
    """Zeros of ``dJ/dm`` bracketed on `m_grid` and refined by Brent's method."""
    ms = np.asarray(m_grid, float)
    gs = [grad_j_reduced(float(m), alpha, d, geom) for m in ms]
    roots = [float(m) for m, g in zip(ms, gs) if g == 0.0]
    for a, b in find_brackets(ms, gs):
        res = brent_zero(lambda x: grad_j_reduced(x, alpha, d, geom),
                         SlownessInterval(float(a), float(b)), tol)
        roots.append(res.root)
    return sorted(roots)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class ExperimentResult:
    exp_id: str
    config: ExperimentConfig
    d_clean: Trace
    d: Trace
    scan_rows: np.ndarray
    stationary: list
    checks: list
    solve: object = None
    truncation: tuple | None = None
    files: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def report(self):
        cfg = self.config
        eta = cfg.noise.eta if cfg.noise.variant != "none" else 0.0
        mu = cfg.wavelet.support_radius
        alpha = self.solve.alpha if self.solve else (cfg.alpha_fixed or 0.0)
        lines = [f"experiment {self.exp_id}", ""]
        lines.append(bnd.format_report(bnd.bound_report(mu, eta, cfg.offset_r, alpha, cfg.lam)))
        lines.append("stationary points of reduced ESI objective (scan alpha="
                     f"{cfg.scan.alpha_list[0]:g}): "
                     + ", ".join(f"{m:.6f}" for m in self.stationary))
        if self.solve is not None:
            r = self.solve.record
            lines += [
                f"discrepancy bounds: ({cfg.bounds.e_minus:.6f}, {cfg.bounds.e_plus:.6f})",
                f"final m     = {self.solve.m:.6f}",
                f"final alpha = {self.solve.alpha:.6f}",
                f"final g, e, J, dJ/dm = {r.g:.6f}, {r.e:.6f}, {r.j:.6f}, {r.dj_dm:.6f}",
                f"alpha cycles = {self.solve.alpha_cycles}, m cycles = {self.solve.m_cycles}",
            ]
        if self.truncation is not None:
            lines.append(f"truncated at lambda={cfg.lam:g}: relative data error "
                         f"epsilon = {self.truncation[1]:.6f}")
        lines.append("")
        for c in self.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        return "\n".join(lines) + "\n"


def _near(values, target, tol):
    return [v for v in values if abs(v - target) <= tol]


def _checks(exp_id, cfg, rows, stat, solve, trunc):
    ms, e_res, e_red = rows[:, 0], rows[:, 1], rows[:, 2]
    r, m_star, mu = cfg.offset_r, cfg.m_star, cfg.wavelet.support_radius
    out = []
    inside = ((ms * r + cfg.wavelet.center - mu >= cfg.window.t_min)
              & (ms * r + cfg.wavelet.center + mu <= cfg.window.t_max))
    plateau_red = np.array([bnd.result1_predicate(m, m_star, cfg.lam, r) for m in ms])
    if exp_id == "1":
        sel = plateau_red & inside
        out.append(Check("restricted FWI plateau = 1",
                         bool(np.all(np.abs(e_res[sel] - 1.0) <= 1e-3)),
                         f"max |e-1| = {np.max(np.abs(e_res[sel] - 1.0)):.2e} on {sel.sum()} points"))
        out.append(Check("reduced FWI plateau = 1/2",
                         bool(np.all(np.abs(e_red[sel] - 0.5) <= 1e-3)),
                         f"max |e-1/2| = {np.max(np.abs(e_red[sel] - 0.5)):.2e}"))
        out.append(Check("unique ESI stationary point at 0.400 +- 1e-3",
                         len(stat) == 1 and abs(stat[0] - 0.4) <= 1e-3, f"{stat}"))
    elif exp_id in ("2a", "2b"):
        target = {"2a": 0.41, "2b": 0.45}[exp_id]
        sel = np.abs(ms - m_star) > 2 * cfg.lam / r
        out.append(Check(f"ESI stationary point at {target} +- 0.005",
                         len(stat) == 1 and abs(stat[0] - target) <= 0.005, f"{stat}"))
        out.append(Check("error within lambda/r", all(abs(m - m_star) <= cfg.lam / r for m in stat),
                         f"lambda/r = {cfg.lam / r:g}"))
        out.append(Check("reduced FWI = 1/2 beyond 2 lambda/r",
                         bool(np.all(np.abs(e_red[sel] - 0.5) <= 1e-3)),
                         f"{sel.sum()} points"))
    elif exp_id == "3":
        radius = bnd.result2_radius(cfg.noise.eta, cfg.lam, r)
        out.append(Check("unique ESI minimizer at 0.401338 +- 1e-3",
                         len(stat) == 1 and abs(stat[0] - 0.401338) <= 1e-3, f"{stat}"))
        out.append(Check(f"within stationary-point radius {radius:.4f}",
                         all(abs(m - m_star) < radius for m in stat), ""))
    elif exp_id == "4":
        out.append(Check(">= 2 ESI stationary points", len(stat) >= 2, f"{stat}"))
        out.append(Check("stationary points near 0.4 and 0.5 (+- 0.01)",
                         bool(_near(stat, 0.4, 0.01)) and bool(_near(stat, 0.5, 0.01)),
                         f"{stat}"))
    elif exp_id == "5":
        out.append(Check("unique ESI stationary point within 0.01 of 0.4",
                         len(stat) == 1 and abs(stat[0] - 0.4) <= 0.01, f"{stat}"))
    if solve is not None:
        both = abs(solve.record.dj_dm) <= cfg.solver.grad_tol and solve.record.e in cfg.bounds
        out.append(Check("stationary with e in bounds", both,
                         f"|grad|={abs(solve.record.dj_dm):.2e}, e={solve.record.e:.6f}"))
    if exp_id == "6":
        ups = [x.record for x in solve.entries("alpha_update")]
        first = ups[:3]
        exp_a = [0.284184, 0.568368, 1.136737]
        exp_e = [0.003140, 0.022460, 0.102216]
        out.append(Check("first alpha cycle matches reference",
                         len(first) == 3 and all(abs(a.alpha - x) <= 1e-3 for a, x in zip(first, exp_a))
                         and all(abs(a.e - x) <= 1e-3 for a, x in zip(first, exp_e)),
                         ", ".join(f"({a.alpha:.6f}, {a.e:.6f})" for a in first)))
        rec = solve.record
        out.append(Check("final (m, alpha, g, e, J) match reference",
                         abs(solve.m - 0.400113) <= 1e-3 and abs(solve.alpha - 2.273473) <= 1e-2
                         and abs(rec.g - 0.002989) <= 1e-3 and abs(rec.e - 0.033828) <= 1e-3
                         and abs(rec.j - 0.049278) <= 1e-3,
                         f"m={solve.m:.6f}, alpha={solve.alpha:.6f}"))
        out.append(Check("truncated error 0.29 +- 0.02", abs(trunc[1] - 0.29) <= 0.02,
                         f"epsilon={trunc[1]:.4f}"))
    if exp_id == "7":
        out.append(Check("truncated error 0.27 +- 0.03", abs(trunc[1] - 0.27) <= 0.03,
                         f"epsilon={trunc[1]:.4f}"))
    return out


def _write_outputs(res, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg, geom = res.config, res.config.geometry
    files = []

    def add(name):
        files.append(out / name)
        return out / name

    write_trace_csv(res.d, add("trace.csv"))
    write_trace_csv(res.d_clean, add("trace_clean.csv"))
    write_scan_csv(res.scan_rows, add("scan.csv"))
    t = res.d.times
    emit_svg([Series(t, res.d.samples, "data")], "time (s)", "pressure", add("data.svg"),
             title=f"experiment {res.exp_id}: data")
    ms = res.scan_rows[:, 0]
    fwi_col, fwi_label = (2, "reduced FWI") if res.exp_id in ("2a", "2b", "3") else (1, "restricted FWI")
    emit_svg([Series(ms, res.scan_rows[:, fwi_col], fwi_label),
              Series(ms, res.scan_rows[:, 3], "reduced ESI")],
             "slowness (s/km)", "objective", add("scan.svg"),
             title=f"experiment {res.exp_id}: objectives")
    if len(cfg.scan.alpha_list) > 1:
        cols = [ms] + [scan(res.d, cfg, alpha=a)[:, 3] for a in cfg.scan.alpha_list]
        write_scan_csv(np.column_stack(cols), add("scan_alphas.csv"),
                       ["m"] + [f"j_alpha_{a:g}" for a in cfg.scan.alpha_list])
        emit_svg([Series(ms, c, f"alpha={a:g}") for a, c in zip(cfg.scan.alpha_list, cols[1:])],
                 "slowness (s/km)", "reduced ESI objective", add("scan_alphas.svg"))
    if res.solve is not None:
        write_log_csv(res.solve.log, add("log.csv"))
        w = res.solve.w_alpha
        w_t = res.truncation[0]
        target = cfg.wavelet(w.lags)
        emit_svg([Series(w.lags, w.samples, "estimated"), Series(w_t.lags, w_t.samples, "truncated"),
                  Series(w.lags, target, "target", "#000000")],
                 "lag (s)", "wavelet", add("wavelets.svg"))
        pred = forward_sampled(res.solve.m, w_t, geom)
        emit_svg([Series(t, pred.samples, "predicted (truncated)"),
                  Series(t, res.d.samples, "data", "#000000"),
                  Series(t, (pred - res.d).samples, "residual")],
                 "time (s)", "pressure", add("truncated_data.svg"))
    add("report.txt").write_text(res.report())
    return files


def run_experiment(exp_id, overrides=None, out_dir=None, config=None):
    """Run one reference experiment; write artifacts when `out_dir` is given."""
    key = normalize_id(exp_id)
    cfg = config if config is not None else experiment_config(key, overrides)
    geom = cfg.geometry
    d_clean, d = synthesize(cfg)
    rows = scan(d, cfg)
    stat = stationary_points(d, cfg.scan.alpha_list[0], geom, cfg.scan.m_grid)
    solve = trunc = None
    if cfg.alpha_fixed is None:
        solve = discrepancy_solve(d, cfg.bounds, cfg.solver, geom, m0=cfg.m_initial)
        trunc = truncate_and_report(solve.m, solve.w_alpha, cfg.lam, d, geom)
    res = ExperimentResult(key, cfg, d_clean, d, rows, stat,
                           _checks(key, cfg, rows, stat, solve, trunc), solve, trunc)
    if out_dir is not None:
        res.files = _write_outputs(res, out_dir)
    return res


def fixed_alpha_inversion(d, cfg):
    """Stationary point at fixed alpha from `cfg.m_initial`, with truncation."""
    geom = cfg.geometry
    alpha = cfg.alpha_fixed
    res = brent_zero(lambda x: grad_j_reduced(x, alpha, d, geom), cfg.solver.search_interval,
                     cfg.solver.grad_tol, cfg.solver.scan_points_for_bracketing,
                     m_current=cfg.m_initial)
    w = solve_w_alpha(res.root, alpha, d, geom)
    w_t, eps = truncate_and_report(res.root, w, cfg.lam, d, geom)
    return res, j_reduced(res.root, alpha, d, geom), w, w_t, eps

