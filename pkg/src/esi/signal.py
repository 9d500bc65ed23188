"""Time grids, traces, wavelets, trapezoid norms and noise synthesis."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "TimeGrid",
    "Trace",
    "AnalyticWavelet",
    "SampledWavelet",
    "NoiseSpec",
    "ricker_eval",
    "trapezoid_weights",
    "inner",
    "norm_sq",
    "norm",
    "uniform_noise",
    "make_coherent_noise",
    "make_filtered_random_noise",
    "make_noise",
    "write_trace_csv",
    "read_trace_csv",
]


def _frozen_array(values, n=None):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected {n} samples, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sample times ``t_min + i*dt`` for ``i = 0..n-1`` (seconds)."""

    t_min: float
    dt: float
    n: int

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not math.isfinite(self.t_min):
            raise ValueError("t_min must be finite")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_bounds(cls, t_min, t_max, dt):
        """Grid covering ``[t_min, t_max]``; the span must be a multiple of dt."""
        steps = (t_max - t_min) / dt
        n = int(round(steps))
        if n < 1 or abs(steps - n) > 1e-9 * max(1.0, abs(steps)):
            raise ValueError(
                f"[{t_min}, {t_max}] is not an integer number of steps of {dt}")
        return cls(t_min, dt, n + 1)

    @property
    def t_max(self):
        return self.t_min + (self.n - 1) * self.dt

    @property
    def times(self):
        return self.t_min + self.dt * np.arange(self.n)

    def shifted(self, offset):
        return TimeGrid(self.t_min + offset, self.dt, self.n)


@dataclass(frozen=True)
class Trace:
    """Pressure samples on a `TimeGrid`. Samples are stored read-only."""

    grid: TimeGrid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_array(self.samples, self.grid.n))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n))

    @property
    def times(self):
        return self.grid.times

    def _check(self, other):
        if other.grid != self.grid:
            raise ValueError("traces live on different grids")

    def __add__(self, other):
        self._check(other)
        return Trace(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        self._check(other)
        return Trace(self.grid, self.samples - other.samples)

    def __mul__(self, c):
        return Trace(self.grid, float(c) * self.samples)

    __rmul__ = __mul__


_CUTOFF_SLACK = 1e-9


def ricker_eval(f_peak, center, mu, t):
    """Truncated zero-phase Ricker wavelet with unit peak.

    ``(1 - 2 pi^2 f^2 u^2) exp(-pi^2 f^2 u^2)`` with ``u = t - center``,
    set to exactly zero where ``|u| > mu``. The cutoff is inclusive, with a
    relative slack of 1e-9 so that rounding in ``t - center`` does not drop
    grid samples that sit on the boundary. Accepts scalar or array `t`.
    """
    u = np.asarray(t, dtype=float) - center
    a = (np.pi * f_peak * u) ** 2
    w = np.where(np.abs(u) <= mu * (1.0 + _CUTOFF_SLACK), (1.0 - 2.0 * a) * np.exp(-a), 0.0)
    return w if w.ndim else float(w)


@dataclass(frozen=True)
class AnalyticWavelet:
    """Closed-form truncated Ricker wavelet, evaluable at any time."""

    peak_frequency: float = 40.0
    center: float = 0.0
    support_radius: float = 0.025
    amplitude: float = 1.0
    kind: str = "ricker"

    def __post_init__(self):
        if self.kind != "ricker":
            raise ValueError(f"unsupported wavelet kind {self.kind!r}")
        if not self.peak_frequency > 0:
            raise ValueError("peak_frequency must be positive")
        if not self.support_radius > 0:
            raise ValueError("support_radius must be positive")

    def __call__(self, t):
        w = ricker_eval(self.peak_frequency, self.center, self.support_radius, t)
        return self.amplitude * w

    def sample(self, grid):
        return SampledWavelet(grid, self(grid.times))


@dataclass(frozen=True)
class SampledWavelet:
    """Wavelet samples on a lag grid (seconds)."""

    lag_grid: TimeGrid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_array(self.samples, self.lag_grid.n))

    @property
    def lags(self):
        return self.lag_grid.times

    def __add__(self, other):
        if other.lag_grid != self.lag_grid:
            raise ValueError("wavelets live on different lag grids")
        return SampledWavelet(self.lag_grid, self.samples + other.samples)

    def __mul__(self, c):
        return SampledWavelet(self.lag_grid, float(c) * self.samples)

    __rmul__ = __mul__


@dataclass(frozen=True)
class NoiseSpec:
    """Recipe for the additive noise trace.

    `variant` is ``"none"``, ``"coherent"`` (shifted, scaled copy of the
    clean data) or ``"filtered_random"`` (seeded uniform noise convolved
    with the target wavelet). `eta` is the noise-to-signal norm ratio.
    """

    variant: str = "none"
    eta: float = 0.0
    time_shift: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.variant not in ("none", "coherent", "filtered_random"):
            raise ValueError(f"unknown noise variant {self.variant!r}")
        if not self.eta >= 0:
            raise ValueError(f"eta must be nonnegative, got {self.eta}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def trapezoid_weights(grid):
    """Quadrature weights of the composite trapezoid rule on `grid`."""
    w = np.full(grid.n, grid.dt)
    w[0] = w[-1] = 0.5 * grid.dt
    return w


def inner(u, v, grid):
    """Trapezoid inner product of two sample arrays on `grid`."""
    return float(np.dot(trapezoid_weights(grid), np.asarray(u) * np.asarray(v)))


def norm_sq(u):
    """Trapezoid approximation of the square integral of a trace or wavelet."""
    grid = u.grid if isinstance(u, Trace) else u.lag_grid
    return inner(u.samples, u.samples, grid)


def norm(u):
    return math.sqrt(norm_sq(u))


def _shift_samples(samples, shift_steps):
    """Delay `samples` by `shift_steps` grid steps, zero fill, linear in between."""
    n = samples.shape[0]
    k = round(shift_steps)
    if abs(shift_steps - k) <= 1e-9:
        out = np.zeros(n)
        if 0 <= k < n:
            out[k:] = samples[: n - k]
        elif -n < k < 0:
            out[: n + k] = samples[-k:]
        return out
    idx = np.arange(n) - shift_steps
    return np.interp(idx, np.arange(n), samples, left=0.0, right=0.0)


def make_coherent_noise(d_star, time_shift, eta):
    """Noise ``c * d_star(t - time_shift)`` with ``||n|| = eta ||d_star||``.

    Energy shifted past the end of the record is lost; a warning is issued
    and the scale is computed from the part that remains in the window.
    """
    d_norm_sq = norm_sq(d_star)
    if d_norm_sq <= 0:
        raise ValueError("clean data has zero norm; cannot scale noise")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    grid = d_star.grid
    if eta == 0:
        return Trace.zeros(grid)
    shifted = Trace(grid, _shift_samples(d_star.samples, time_shift / grid.dt))
    s_norm_sq = norm_sq(shifted)
    if s_norm_sq <= 0:
        raise ValueError("shift moves all signal energy outside the record window")
    if not math.isclose(s_norm_sq, d_norm_sq, rel_tol=1e-6):
        warnings.warn(
            "shifted signal loses energy outside the record window; "
            "rescaling on the window", RuntimeWarning, stacklevel=2)
    return shifted * (eta * math.sqrt(d_norm_sq / s_norm_sq))


def uniform_noise(seed, n):
    """`n` i.i.d. uniform[-1, 1) samples from a Philox4x64 counter-based stream.

    Each double uses the top 53 bits of a 64-bit output, mapped to [0, 1)
    and then affinely to [-1, 1). The stream is fixed by `seed`.
    """
    gen = np.random.Generator(np.random.Philox(seed))
    return 2.0 * gen.random(n) - 1.0


def make_filtered_random_noise(seed, filter, grid, eta, d_star):
    """Band-limited random noise scaled so that ``||n|| = eta ||d_star||``.

    Uniform samples on `grid` are convolved with `filter` sampled at the
    grid step (lag zero aligned with the output sample).
    """
    d_norm_sq = norm_sq(d_star)
    if d_norm_sq <= 0:
        raise ValueError("clean data has zero norm; cannot scale noise")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0:
        return Trace.zeros(grid)
    dt = grid.dt
    k_lo = math.ceil((filter.center - filter.support_radius) / dt - 1e-9)
    k_hi = math.floor((filter.center + filter.support_radius) / dt + 1e-9)
    taps = filter(dt * np.arange(k_lo, k_hi + 1))
    u = uniform_noise(seed, grid.n)
    full = np.convolve(u, taps)
    # full[j] = sum_k u[j - k + k_lo] * taps[k - k_lo]; output index i = j + k_lo
    start = -k_lo
    out = np.zeros(grid.n)
    lo, hi = max(start, 0), min(start + grid.n, full.shape[0])
    out[lo - start: hi - start] = full[lo:hi]
    noise = Trace(grid, out)
    n_norm_sq = norm_sq(noise)
    if n_norm_sq <= 0:
        raise ValueError("filtered noise vanished on the grid")
    return noise * (eta * math.sqrt(d_norm_sq / n_norm_sq))


def make_noise(spec, d_star, filter):
    """Dispatch on `NoiseSpec.variant`."""
    if spec.variant == "none" or spec.eta == 0:
        return Trace.zeros(d_star.grid)
    if spec.variant == "coherent":
        return make_coherent_noise(d_star, spec.time_shift, spec.eta)
    return make_filtered_random_noise(spec.seed, filter, d_star.grid, spec.eta, d_star)


def write_trace_csv(trace, path):
    """Write ``t,value`` rows at full double precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "value"])
        for t, v in zip(trace.times, trace.samples):
            writer.writerow([f"{t:.17g}", f"{v:.17g}"])


def read_trace_csv(path):
    """Read a trace CSV written by `write_trace_csv`; the time axis must be uniform."""
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["t", "value"]:
            raise ValueError(f"{path}: expected header 't,value', got {header}")
        rows = [(float(a), float(b)) for a, b in reader]
    t = np.array([r[0] for r in rows])
    v = np.array([r[1] for r in rows])
    if t.size < 2:
        raise ValueError(f"{path}: need at least two samples")
    dt = (t[-1] - t[0]) / (t.size - 1)
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=0.0):
        raise ValueError(f"{path}: time axis is not uniform")
    return Trace(TimeGrid(float(t[0]), float(dt), t.size), v)
