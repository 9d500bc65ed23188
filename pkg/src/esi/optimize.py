"""Penalty-weight selection by the discrepancy principle.

The discrepancy algorithm alternates two moves until it finds a slowness
``m`` that is a stationary point of the reduced ESI objective *and* whose
data misfit ``e`` lies inside ``(e_minus, e_plus)``:

1. raise ``alpha`` at fixed ``m`` until ``e`` is inside the interval;
2. move ``m`` to a zero of ``dJ/dm`` at fixed ``alpha`` (Brent's method).

The final extended wavelet is then truncated to the prescribed lag to give
a solution of the support-constrained inverse problem.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .forward import SlownessInterval, forward_sampled
from .objectives import EvalRecord, j_reduced, solve_w_alpha, support_mask
from .signal import SampledWavelet, norm

__all__ = [
    "ConvergenceError",
    "DegenerateDataError",
    "DiscrepancyBounds",
    "SolverConfig",
    "LogEntry",
    "BrentResult",
    "DiscrepancyResult",
    "ALPHA_RULES",
    "basic_alpha_update",
    "alpha_update_cycle",
    "brent_zero",
    "find_brackets",
    "discrepancy_solve",
    "truncate_and_report",
    "write_log_csv",
]

ALPHA_RULES = ("basic", "doubling")
LOG_FIELDS = ["phase", "iter", "alpha", "g", "e", "m", "j", "grad"]


class ConvergenceError(RuntimeError):
    """An iteration hit its step or cycle limit."""


class DegenerateDataError(RuntimeError):
    """The extended wavelet has no energy away from zero lag (g = 0)."""


@dataclass(frozen=True)
class DiscrepancyBounds:
    e_minus: float
    e_plus: float

    def __post_init__(self):
        if not 0 < self.e_minus < self.e_plus:
            raise ValueError(
                f"need 0 < e_minus < e_plus, got ({self.e_minus}, {self.e_plus})")

    @classmethod
    def from_target_snr(cls, snr=3.0, gamma=0.49):
        """Bounds ``(gamma e_tgt, e_tgt / gamma)`` around ``e_tgt = 1 / (2 snr^2)``."""
        e_tgt = 0.5 / snr**2
        return cls(gamma * e_tgt, e_tgt / gamma)

    def __contains__(self, e):
        return self.e_minus < e < self.e_plus


@dataclass(frozen=True)
class SolverConfig:
    search_interval: SlownessInterval = SlownessInterval(0.33, 0.65)
    grad_tol: float = 0.01
    max_outer_iters: int = 100
    max_alpha_updates_per_cycle: int = 25
    scan_points_for_bracketing: int = 129
    alpha_rule: str = "basic"

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        for name in ("max_outer_iters", "max_alpha_updates_per_cycle",
                     "scan_points_for_bracketing"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.alpha_rule not in ALPHA_RULES:
            raise ValueError(f"alpha_rule must be one of {ALPHA_RULES}")


@dataclass(frozen=True)
class LogEntry:
    phase: str  # alpha_seed | alpha_update | m_update
    iter: int
    record: EvalRecord

    def row(self):
        r = self.record
        return [self.phase, self.iter, r.alpha, r.g, r.e, r.m, r.j, r.dj_dm]


def basic_alpha_update(alpha, e, g, e_plus):
    """``sqrt(alpha^2 + (e_plus - e) / (2 g))``.

    For ``e > e_plus`` this lowers alpha; the square is floored at a
    quarter of the current one so alpha stays positive.
    """
    if not g > 0:
        raise DegenerateDataError("penalty term vanished; cannot update alpha")
    a2 = alpha**2 + (e_plus - e) / (2.0 * g)
    return math.sqrt(max(a2, 0.25 * alpha**2))


def _lower_alpha(alpha, e, g, bounds):
    # aim at the geometric middle of the interval; stepping to e_plus from
    # above only approaches it asymptotically
    target = math.sqrt(bounds.e_minus * bounds.e_plus)
    return basic_alpha_update(alpha, e, g, target)


def alpha_update_cycle(m, alpha0, d, bounds, geom, max_steps=25, rule="basic"):
    """Raise alpha at fixed slowness until ``e`` enters the discrepancy interval.

    ``rule="basic"`` applies `basic_alpha_update` at every step.
    ``rule="doubling"`` seeds a zero alpha with ``(e_plus - e) / (2 g)`` and
    then doubles; a doubling that would reach ``e_plus`` falls back to the
    basic step. The doubling schedule is the one the reference experiment-6
    iteration log follows.

    Returns ``(alpha, entries)`` where `entries` are the `LogEntry` rows of
    the evaluations made after the initial one (empty if no update needed).
    """
    if rule not in ALPHA_RULES:
        raise ValueError(f"rule must be one of {ALPHA_RULES}")
    alpha = float(alpha0)
    rec = j_reduced(m, alpha, d, geom)
    entries = []
    while rec.e not in bounds:
        if len(entries) >= max_steps:
            raise ConvergenceError(
                f"alpha update did not reach ({bounds.e_minus}, {bounds.e_plus}) "
                f"in {max_steps} steps at m={m}; last e={rec.e}")
        if not rec.g > 0:
            raise DegenerateDataError(f"g = 0 at m={m}, alpha={alpha}")
        phase = "alpha_update"
        if rule == "doubling" and rec.e < bounds.e_plus:
            if alpha == 0.0:
                new_alpha = (bounds.e_plus - rec.e) / (2.0 * rec.g)
                phase = "alpha_seed"
            else:
                new_alpha = 2.0 * alpha
            new_rec = j_reduced(m, new_alpha, d, geom)
            if new_rec.e >= bounds.e_plus:
                new_alpha = basic_alpha_update(alpha, rec.e, rec.g, bounds.e_plus)
                new_rec = j_reduced(m, new_alpha, d, geom)
        elif rec.e >= bounds.e_plus:
            new_alpha = _lower_alpha(alpha, rec.e, rec.g, bounds)
            new_rec = j_reduced(m, new_alpha, d, geom)
        else:
            new_alpha = basic_alpha_update(alpha, rec.e, rec.g, bounds.e_plus)
            if new_alpha == alpha:
                break
            new_rec = j_reduced(m, new_alpha, d, geom)
        alpha, rec = new_alpha, new_rec
        entries.append(LogEntry(phase, len(entries) + 1, rec))
    return alpha, entries


@dataclass(frozen=True)
class BrentResult:
    root: float
    value: float
    converged: bool
    bracketed: bool
    bracket: tuple
    n_evals: int


def find_brackets(xs, fs):
    """Sub-intervals ``(x_i, x_{i+1})`` of a scan across which `fs` changes sign.

    Exact zeros are skipped over so a zero sample between opposite signs
    yields one bracket spanning it.
    """
    out = []
    prev = None
    for x, f in zip(xs, fs):
        if f == 0:
            continue
        if prev is not None and (prev[1] < 0) != (f < 0):
            out.append((prev[0], x))
        prev = (x, f)
    return out


def _zeroin(f, a, b, fa, fb, ftol, xtol, wtol, maxiter):
    """Brent's zero finder on a sign-change interval.

    Stops once ``|f| <= ftol`` and the bracket is no wider than `wtol`.
    """
    eps = np.finfo(float).eps
    c, fc = a, fa
    d = e = b - a
    for _ in range(maxiter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        if abs(fb) <= ftol and abs(c - b) <= wtol:
            return b, fb, True
        tol = 2.0 * eps * abs(b) + 0.5 * xtol
        half = 0.5 * (c - b)
        if abs(half) <= tol:
            return b, fb, abs(fb) <= ftol
        if abs(e) >= tol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p, q = 2.0 * half * s, 1.0 - s
            else:
                q, r = fa / fc, fb / fc
                p = s * (2.0 * half * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * half * q - abs(tol * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = half
        else:
            d = e = half
        a, fa = b, fb
        b += d if abs(d) > tol else math.copysign(tol, half)
        fb = f(b)
    return b, fb, abs(fb) <= ftol


def brent_zero(fn, interval, grad_tol, scan_points=129, m_current=None,
               xtol=1e-12, bracket_tol=1e-6, maxiter=200):
    """Locate ``m`` in `interval` with ``|fn(m)| <= grad_tol``.

    If the endpoint values do not differ in sign, a uniform scan of
    `scan_points` samples looks for sign changes and the bracket whose
    midpoint is nearest `m_current` (ties: lower m) is refined; an exact
    zero on the scan counts as a bracket of width zero. With no bracket at
    all the endpoint of smaller ``|fn|`` is returned with ``bracketed=False``.

    A point is accepted only when it also lies in a sign-change bracket no
    wider than `bracket_tol`, so flat stretches where ``|fn|`` is merely
    small are not mistaken for zeros.
    """
    lo, hi = interval.m_min, interval.m_max
    calls = [0]

    def f(x):
        calls[0] += 1
        return float(fn(x))

    f_lo, f_hi = f(lo), f(hi)
    for x, fx in ((lo, f_lo), (hi, f_hi)):
        if fx == 0.0:
            return BrentResult(x, fx, True, True, (x, x), calls[0])
    if (f_lo < 0) != (f_hi < 0):
        a, b, fa, fb = lo, hi, f_lo, f_hi
    else:
        xs = np.linspace(lo, hi, max(scan_points, 2))
        fs = [f_lo] + [f(x) for x in xs[1:-1]] + [f_hi]
        brackets = find_brackets(xs, fs) + [(x, x) for x, fx in zip(xs, fs) if fx == 0.0]
        if not brackets:
            x, fx = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
            return BrentResult(x, fx, abs(fx) <= grad_tol, False, (lo, hi), calls[0])
        ref = lo if m_current is None else m_current
        a, b = min(brackets, key=lambda br: (abs(0.5 * (br[0] + br[1]) - ref), br[0]))
        a, b = float(a), float(b)
        if a == b:
            return BrentResult(a, 0.0, True, True, (a, b), calls[0])
        fa, fb = f(a), f(b)
    root, value, ok = _zeroin(f, a, b, fa, fb, grad_tol, xtol, bracket_tol, maxiter)
    return BrentResult(root, value, ok, True, (a, b), calls[0])


@dataclass
class DiscrepancyResult:
    m: float
    alpha: float
    w_alpha: SampledWavelet
    record: EvalRecord
    log: list = field(default_factory=list)
    alpha_cycles: int = 0
    m_cycles: int = 0

    def entries(self, phase):
        return [x for x in self.log if x.phase == phase]


def discrepancy_solve(d, bounds, config, geom, m0=0.343, alpha0=0.0):
    """Solve the discrepancy problem by alternating alpha and slowness updates.

    Starting from ``alpha0`` (zero gives a perfect fit at any slowness) and
    ``m0``, each outer cycle raises alpha until ``e`` is in bounds, then
    runs Brent's method on ``dJ/dm``. The loop stops at the first
    stationary point whose misfit is in bounds.
    """
    m, alpha = float(m0), float(alpha0)
    log = []
    alpha_cycles = m_cycles = 0
    for _ in range(config.max_outer_iters):
        alpha, entries = alpha_update_cycle(
            m, alpha, d, bounds, geom,
            max_steps=config.max_alpha_updates_per_cycle, rule=config.alpha_rule)
        if entries:
            alpha_cycles += 1
            log.extend(entries)

        evals = []

        def grad(x, a=alpha):
            rec = j_reduced(x, a, d, geom)
            evals.append(rec)
            return rec.dj_dm

        res = brent_zero(grad, config.search_interval, config.grad_tol,
                         config.scan_points_for_bracketing, m_current=m)
        m_cycles += 1
        log.extend(LogEntry("m_update", i + 1, r) for i, r in enumerate(evals))
        m = res.root
        rec = j_reduced(m, alpha, d, geom)
        if not res.bracketed and rec.e in bounds:
            raise ConvergenceError(
                f"no stationary point of the reduced objective in "
                f"[{config.search_interval.m_min}, {config.search_interval.m_max}] "
                f"at alpha={alpha}")
        if res.converged and rec.e in bounds:
            return DiscrepancyResult(m, alpha, solve_w_alpha(m, alpha, d, geom), rec,
                                     log, alpha_cycles, m_cycles)
    raise ConvergenceError(f"no solution after {config.max_outer_iters} outer iterations")


def truncate_and_report(m, w, lam, d, geom):
    """Zero the wavelet outside ``[-lam, lam]`` and measure the relative data error."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    keep = support_mask(w.lags, lam, w.lag_grid.dt)
    w_trunc = SampledWavelet(w.lag_grid, np.where(keep, w.samples, 0.0))
    eps = norm(forward_sampled(m, w_trunc, geom) - d) / norm(d)
    return w_trunc, eps


def write_log_csv(log, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LOG_FIELDS)
        for entry in log:
            row = entry.row()
            writer.writerow(row[:2] + [f"{v:.17g}" for v in row[2:]])
