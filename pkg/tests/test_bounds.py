import math

import numpy as np
import pytest

from esi.bounds import (ETA_MAX, BoundsInapplicable, NoiseLevel, bound_report, closer_count,
                        eps_min, f_eta, format_report, lambda_min, result1_predicate,
                        result2_radius)
from esi.experiments import stationary_points

SCAN = 0.25 + 0.0005 * np.arange(801)


def test_f_eta_values():
    assert f_eta(0.0) == 0.0
    assert f_eta(0.3) == pytest.approx(0.78 / 0.61, rel=1e-12)


def test_f_eta_increasing_and_singular():
    etas = np.linspace(0.0, 0.6, 100)
    fs = [f_eta(e) for e in etas]
    assert all(b > a for a, b in zip(fs, fs[1:]))
    assert f_eta(ETA_MAX - 1e-9) > 1e8
    # 0.61 is still below the singular point 0.618..., so f is large but finite
    assert 100 < f_eta(0.61) < 120
    with pytest.raises(BoundsInapplicable):
        f_eta(0.62)
    with pytest.raises(BoundsInapplicable):
        f_eta(ETA_MAX)
    with pytest.raises(ValueError):
        f_eta(-0.1)
    with pytest.raises(ValueError):
        NoiseLevel(-1.0)


def test_result2_radius():
    assert result2_radius(0.0, 0.1, 1.0) == 0.1
    assert result2_radius(0.3, 0.025, 1.0) == pytest.approx(0.057, abs=5e-4)


def test_lambda_min():
    assert lambda_min(0.025, 0.3) == pytest.approx(0.082, abs=5e-4)
    assert lambda_min(0.025, 0.0) == 0.05
    assert lambda_min(0.025, 0.1) == pytest.approx((2 + f_eta(0.1)) * 0.025, rel=1e-15)


def test_eps_min():
    assert eps_min(0.0, 0.025, 0.3, 1.0) == 0.3
    assert abs(eps_min(1e6, 0.025, 0.3, 1.0) - 1.3) < 1e-6
    v = eps_min(2.273473, 0.025, 0.3, 1.0)
    assert v == pytest.approx(0.971108, abs=1e-5)
    # the guarantee is far above the error actually obtained (about 0.29)
    assert v > 3 * 0.29


def test_result1_predicate():
    assert result1_predicate(0.45, 0.4, 0.025, 1.0)
    assert not result1_predicate(0.42, 0.4, 0.025, 1.0)
    assert result1_predicate(0.5, 0.4, 0.05, 1.0)


def test_report():
    rep = bound_report(0.025, 0.3, 1.0, 1.0, 0.082)
    assert rep.lambda_min == pytest.approx(0.082, abs=5e-4)
    text = format_report(rep)
    assert "minimum truncation lag" in text
    bad = bound_report(0.025, 0.8, 1.0, 1.0, 0.082)
    assert math.isnan(bad.result2_radius) and not bad.applicable["result2"]
    assert "do not apply" in format_report(bad)


def test_closer_count():
    assert closer_count([4, 3, 2, 1]) == 3
    assert closer_count([1, 2, 1, 0.5]) == 2


def test_stationary_point_approaches_target(geom, d_coherent):
    # track the stationary point by continuation from the previous one
    prev, dist = 0.4, []
    for alpha in (0.25, 0.5, 1.0, 2.0, 4.0):
        stat = stationary_points(d_coherent, alpha, geom, SCAN)
        m = min(stat, key=lambda x: abs(x - prev))
        dist.append(abs(m - 0.4))
        prev = m
    assert closer_count(dist) >= 3
