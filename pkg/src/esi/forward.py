"""Point-source transmission forward map, its adjoint, and data synthesis.

In a homogeneous medium the pressure at distance ``r`` from a point source
with wavelet ``w`` is ``w(t - m r) / (4 pi r)``. Sampled wavelets are kept
on a *lag grid*, the record grid shifted by ``-m r``, so the map is an exact
sample-to-sample scaling for every real slowness ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal import AnalyticWavelet, SampledWavelet, TimeGrid, Trace

__all__ = [
    "GridMismatchError",
    "Geometry",
    "SlownessInterval",
    "amplitude",
    "forward_analytic",
    "lag_grid_for",
    "forward_sampled",
    "forward",
    "adjoint",
]


class GridMismatchError(ValueError):
    """A wavelet or trace is not on the grid the operator expects.

    Resample explicitly (e.g. with ``numpy.interp``) before calling again.
    """


@dataclass(frozen=True)
class Geometry:
    offset_r: float
    record_grid: TimeGrid

    def __post_init__(self):
        if not self.offset_r > 0:
            raise ValueError(f"offset_r must be positive, got {self.offset_r}")


@dataclass(frozen=True)
class SlownessInterval:
    m_min: float
    m_max: float

    def __post_init__(self):
        if not 0 < self.m_min <= self.m_max:
            raise ValueError(
                f"need 0 < m_min <= m_max, got [{self.m_min}, {self.m_max}]")

    def __contains__(self, m):
        return self.m_min <= m <= self.m_max


def _check_slowness(m):
    if not m > 0:
        raise ValueError(f"slowness must be positive, got {m}")


def amplitude(geom):
    """Geometric spreading factor ``1 / (4 pi r)``."""
    return 1.0 / (4.0 * math.pi * geom.offset_r)


def forward_analytic(m, w, geom):
    """Exact receiver trace for an analytic wavelet (no interpolation)."""
    _check_slowness(m)
    t = geom.record_grid.times
    return Trace(geom.record_grid, amplitude(geom) * w(t - m * geom.offset_r))


def lag_grid_for(m, geom):
    _check_slowness(m)
    g = geom.record_grid
    return TimeGrid(g.t_min - m * geom.offset_r, g.dt, g.n)


def forward_sampled(m, w, geom):
    expected = lag_grid_for(m, geom)
    if w.lag_grid != expected:
        raise GridMismatchError(
            f"wavelet lag grid {w.lag_grid} does not match {expected} for m={m}")
    return Trace(geom.record_grid, amplitude(geom) * w.samples)


def forward(m, w, geom):
    """`forward_analytic` or `forward_sampled`, depending on the wavelet type."""
    if isinstance(w, AnalyticWavelet):
        return forward_analytic(m, w, geom)
    return forward_sampled(m, w, geom)


def adjoint(m, d, geom):
    """Transpose of the forward map under matched trapezoid inner products."""
    if d.grid != geom.record_grid:
        raise GridMismatchError(
            f"trace grid {d.grid} does not match record grid {geom.record_grid}")
    return SampledWavelet(lag_grid_for(m, geom), amplitude(geom) * np.asarray(d.samples))
