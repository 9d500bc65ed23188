import math

import numpy as np
import pytest

from esi.signal import (AnalyticWavelet, NoiseSpec, TimeGrid, Trace, make_coherent_noise,
                        make_filtered_random_noise, make_noise, norm, norm_sq, read_trace_csv,
                        ricker_eval, trapezoid_weights, uniform_noise, write_trace_csv)


def test_ricker_peak_cutoff_and_zero():
    assert ricker_eval(40.0, 0.0, 0.025, 0.0) == 1.0
    assert ricker_eval(40.0, 0.0, 0.025, 0.03) == 0.0
    t0 = 1.0 / (math.pi * 40.0 * math.sqrt(2.0))
    assert abs(ricker_eval(40.0, 0.0, 0.025, t0)) < 1e-15


def test_ricker_support_boundary_inclusive():
    w = AnalyticWavelet(40.0, 0.0, 0.025)
    assert w(0.025) != 0.0
    assert w(0.0250001) == 0.0
    assert w(0.375 - 0.4) != 0.0


def test_ricker_even_about_center():
    s = np.linspace(0.0, 0.03, 301)
    w = AnalyticWavelet(40.0, 0.0, 0.025)
    assert np.array_equal(w(s), w(-s))
    # an off-zero center only loses the rounding of t - center
    w = AnalyticWavelet(40.0, 0.05, 0.025)
    np.testing.assert_allclose(w(0.05 + s), w(0.05 - s), rtol=0, atol=1e-12)


def test_norm_of_constant_is_exact():
    for dt in (0.1, 0.01, 0.003125):
        g = TimeGrid.from_bounds(0.0, 1.0, dt)
        assert norm_sq(Trace(g, np.ones(g.n))) == pytest.approx(1.0, rel=1e-14)


def test_norm_zero_and_linear():
    g = TimeGrid.from_bounds(0.0, 1.0, 0.001)
    assert norm_sq(Trace.zeros(g)) == 0.0
    assert abs(norm_sq(Trace(g, g.times)) - 1.0 / 3.0) < 1e-6


def test_norm_homogeneous(rng):
    g = TimeGrid.from_bounds(0.25, 0.65, 0.001)
    u = Trace(g, rng.standard_normal(g.n))
    assert norm_sq(u) >= 0
    for c in (-3.0, 0.5, 7.25):
        assert norm_sq(u * c) == pytest.approx(c * c * norm_sq(u), rel=1e-14)


def test_trapezoid_against_refined_grid():
    w = AnalyticWavelet(40.0, 0.0, 0.025)
    coarse = TimeGrid.from_bounds(-0.1, 0.1, 0.001)
    fine = TimeGrid.from_bounds(-0.1, 0.1, 0.0001)
    a = norm_sq(Trace(coarse, w(coarse.times)))
    b = norm_sq(Trace(fine, w(fine.times)))
    assert abs(a - b) / b < 1e-5


def test_trapezoid_weights_sum_to_length():
    g = TimeGrid.from_bounds(0.25, 0.65, 0.001)
    assert trapezoid_weights(g).sum() == pytest.approx(0.4, rel=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid.from_bounds(0.0, 1.0, -0.001)
    with pytest.raises(ValueError):
        TimeGrid.from_bounds(1.0, 0.0, 0.001)


def test_trace_rejects_nonfinite():
    g = TimeGrid.from_bounds(0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        Trace(g, [0.0, math.nan, 1.0])


def test_coherent_noise_scale_and_position(d_clean):
    n = make_coherent_noise(d_clean, 0.1, 0.3)
    assert norm(n) / norm(d_clean) == pytest.approx(0.3, rel=1e-12)
    t = n.times
    centroid = np.sum(t * n.samples**2) / np.sum(n.samples**2)
    assert centroid == pytest.approx(0.5, abs=1e-9)
    assert np.all(n.samples[np.abs(t - 0.5) > 0.0251] == 0.0)


def test_coherent_noise_zero_eta(d_clean):
    assert norm_sq(make_coherent_noise(d_clean, 0.1, 0.0)) == 0.0


def test_coherent_noise_errors(grid, d_clean):
    with pytest.raises(ValueError):
        make_coherent_noise(Trace.zeros(grid), 0.1, 0.3)
    with pytest.warns(RuntimeWarning):
        make_coherent_noise(d_clean, 0.24, 0.3)


def test_uniform_noise_range_and_determinism():
    a = uniform_noise(7, 5000)
    assert np.array_equal(a, uniform_noise(7, 5000))
    assert a.min() >= -1.0 and a.max() < 1.0
    assert not np.array_equal(a, uniform_noise(8, 5000))


def test_filtered_noise_scale_and_determinism(grid, d_clean, w_star):
    a = make_filtered_random_noise(3, w_star, grid, 1.0, d_clean)
    b = make_filtered_random_noise(3, w_star, grid, 1.0, d_clean)
    assert np.array_equal(a.samples, b.samples)
    assert norm(a) / norm(d_clean) == pytest.approx(1.0, rel=1e-12)
    assert norm_sq(make_filtered_random_noise(3, w_star, grid, 0.0, d_clean)) == 0.0


def test_filtered_noise_is_band_limited(grid, d_clean, w_star):
    n = make_filtered_random_noise(0, w_star, grid, 1.0, d_clean)
    spec = np.abs(np.fft.rfft(n.samples)) ** 2
    freqs = np.fft.rfftfreq(grid.n, grid.dt)
    taps = np.abs(np.fft.rfft(w_star(grid.dt * np.arange(-25, 26)), grid.n))
    band = taps >= 0.05 * taps.max()
    assert freqs[band].max() < 150.0
    assert spec[band].sum() / spec.sum() > 0.95


def test_make_noise_dispatch(d_clean, w_star):
    assert norm_sq(make_noise(NoiseSpec(), d_clean, w_star)) == 0.0
    n = make_noise(NoiseSpec("coherent", 0.3), d_clean, w_star)
    assert norm(n) / norm(d_clean) == pytest.approx(0.3, rel=1e-12)
    with pytest.raises(ValueError):
        NoiseSpec("pink", 0.3)
    with pytest.raises(ValueError):
        NoiseSpec("coherent", -0.1)


def test_trace_csv_round_trip(tmp_path, d_coherent):
    p = tmp_path / "trace.csv"
    write_trace_csv(d_coherent, p)
    back = read_trace_csv(p)
    assert np.array_equal(back.samples, d_coherent.samples)
    assert back.grid.n == d_coherent.grid.n
    assert back.grid.t_min == d_coherent.grid.t_min


def test_trace_csv_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("time,v\n0,1\n1,2\n")
    with pytest.raises(ValueError):
        read_trace_csv(p)
