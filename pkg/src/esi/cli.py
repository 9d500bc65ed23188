"""Command line entry point: ``esi <subcommand> [options]``.

Exit codes: 0 success, 1 validation error, 2 solver non-convergence,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds as bnd
from .experiments import (DEFAULTS, EXPERIMENT_IDS, ConfigError, _merge, config_from_dict,
                          experiment_defaults, fixed_alpha_inversion, run_experiment,
                          scan, synthesize, write_scan_csv)
from .optimize import ConvergenceError, discrepancy_solve, truncate_and_report, write_log_csv
from .signal import read_trace_csv, write_trace_csv
from .svg import Series, emit_svg

EXIT_OK, EXIT_VALIDATION, EXIT_NONCONVERGENCE, EXIT_IO = 0, 1, 2, 3


def _m_grid(text):
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B:STEP, got {text!r}") from None
    return {"m_min": a, "m_max": b, "step": step}


def _common(p):
    p.add_argument("--config", type=Path, help="JSON configuration file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--seed", type=int, help="noise seed")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--alpha", type=float, help="fixed penalty weight")
    mode.add_argument("--discrepancy", action="store_true",
                      help="choose alpha with the discrepancy algorithm")
    p.add_argument("--lambda", dest="lam", type=float, help="support / truncation lag (s)")
    p.add_argument("--m-grid", type=_m_grid, help="scan grid A:B:STEP (s/km)")


def build_parser():
    parser = argparse.ArgumentParser(prog="esi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("synth", "write the synthetic data trace"),
                        ("scan", "tabulate objective landscapes over slowness"),
                        ("invert", "discrepancy or fixed-alpha inversion with truncation")]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "invert":
            p.add_argument("--data", type=Path, help="invert this trace CSV instead of synthesizing")
    p = sub.add_parser("experiment", help="run a reference experiment")
    p.add_argument("id", help=f"one of {', '.join(EXPERIMENT_IDS)}")
    _common(p)
    p = sub.add_parser("bounds", help="print the theoretical bound calculators")
    p.add_argument("--mu", type=float, default=0.025)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.025)
    p.add_argument("--out", type=Path, help="also write report.txt here")
    return parser


def _overrides(args):
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
        over["noise"] = {"seed": args.seed}
    if args.alpha is not None:
        over["alpha_fixed"] = args.alpha
    if args.discrepancy:
        over["alpha_fixed"] = None
    if args.lam is not None:
        over["lambda"] = args.lam
    if args.m_grid is not None:
        over["scan"] = args.m_grid
    return over


def _load(args, base):
    if args.config is not None:
        try:
            doc = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        base = _merge(base, doc)
    return config_from_dict(_overrides(args), base)


def _cmd_synth(args):
    cfg = _load(args, DEFAULTS)
    args.out.mkdir(parents=True, exist_ok=True)
    d_clean, d = synthesize(cfg)
    write_trace_csv(d, args.out / "trace.csv")
    write_trace_csv(d_clean, args.out / "trace_clean.csv")
    emit_svg([Series(d.times, d.samples, "data")], "time (s)", "pressure", args.out / "data.svg")
    print(f"wrote {args.out / 'trace.csv'}")


def _cmd_scan(args):
    cfg = _load(args, DEFAULTS)
    args.out.mkdir(parents=True, exist_ok=True)
    _, d = synthesize(cfg)
    rows = scan(d, cfg)
    write_scan_csv(rows, args.out / "scan.csv")
    ms = rows[:, 0]
    emit_svg([Series(ms, rows[:, 1], "restricted FWI"), Series(ms, rows[:, 2], "reduced FWI"),
              Series(ms, rows[:, 3], "reduced ESI")],
             "slowness (s/km)", "objective", args.out / "scan.svg")
    print(f"wrote {args.out / 'scan.csv'} ({len(rows)} rows)")


def _cmd_invert(args):
    cfg = _load(args, DEFAULTS)
    args.out.mkdir(parents=True, exist_ok=True)
    if args.data is not None:
        d = read_trace_csv(args.data)
        if d.grid != cfg.window:
            cfg = config_from_dict({"window": {"t_min": d.grid.t_min, "t_max": d.grid.t_max,
                                               "dt": d.grid.dt}}, cfg.raw)
            d = type(d)(cfg.window, d.samples)
    else:
        _, d = synthesize(cfg)
    geom = cfg.geometry
    lines = []
    if cfg.alpha_fixed is None:
        res = discrepancy_solve(d, cfg.bounds, cfg.solver, geom, m0=cfg.m_initial)
        write_log_csv(res.log, args.out / "log.csv")
        m, alpha, rec, w = res.m, res.alpha, res.record, res.w_alpha
        _, eps = truncate_and_report(m, w, cfg.lam, d, geom)
        lines.append(f"alpha cycles = {res.alpha_cycles}, m cycles = {res.m_cycles}")
    else:
        br, rec, w, _, eps = fixed_alpha_inversion(d, cfg)
        if not br.converged:
            raise ConvergenceError(f"no stationary point found (|grad|={abs(br.value):.3g})")
        m, alpha = br.root, cfg.alpha_fixed
    lines = [f"m = {m:.6f}", f"alpha = {alpha:.6f}",
             f"g, e, J, dJ/dm = {rec.g:.6f}, {rec.e:.6f}, {rec.j:.6f}, {rec.dj_dm:.6f}",
             f"truncated at lambda={cfg.lam:g}: epsilon = {eps:.6f}"] + lines
    text = "\n".join(lines) + "\n"
    (args.out / "report.txt").write_text(text)
    sys.stdout.write(text)


def _cmd_experiment(args):
    base = experiment_defaults(args.id)
    cfg = _load(args, base)
    res = run_experiment(args.id, config=cfg, out_dir=args.out)
    sys.stdout.write(res.report())


def _cmd_bounds(args):
    text = bnd.format_report(bnd.bound_report(args.mu, args.eta, args.r, args.alpha, args.lam))
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.txt").write_text(text)
    sys.stdout.write(text)


COMMANDS = {"synth": _cmd_synth, "scan": _cmd_scan, "invert": _cmd_invert,
            "experiment": _cmd_experiment, "bounds": _cmd_bounds}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"esi: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"esi: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"esi: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
