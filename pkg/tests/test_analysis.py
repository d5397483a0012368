import math

import numpy as np
import pytest

from twosite.analysis import interior_maxima, is_monotone_nondecreasing, plateau_flatness, summarize_curve


def test_monotone_tolerates_rounding_noise():
    assert is_monotone_nondecreasing([0.0, 1e-17, -1e-17, 0.5, 0.5, 1.0])
    assert not is_monotone_nondecreasing([0.0, 0.5, 0.4])
    assert is_monotone_nondecreasing([])


def test_single_interior_maximum():
    x = np.geomspace(1e-3, 20.0, 300)
    y = x ** 2 * np.exp(-4.0 * x)
    maxima = interior_maxima(y)
    assert len(maxima) == 1
    assert x[maxima[0]] == pytest.approx(0.5, rel=0.05)


def test_interior_maxima_ignore_noise_below_floor():
    y = np.array([0.0, 0.5, 1.0, 0.5, 1e-9, 3e-9, 1e-9, 0.0])
    assert interior_maxima(y) == [2]


def test_interior_maxima_collapse_flat_tops_and_skip_edges():
    assert interior_maxima([0.0, 1.0, 1.0, 0.0]) == [1]
    assert interior_maxima([3.0, 2.0, 1.0]) == []
    assert interior_maxima([0.0, 1.0]) == []
    assert interior_maxima([0.0, 1.0, 0.0, 2.0, 0.0]) == [1, 3]


def test_plateau_flatness():
    grid = np.linspace(1.0, 100.0, 100)
    assert plateau_flatness(grid, np.full(100, 2.0)) == 0.0
    values = grid / (grid + 1.0)
    assert plateau_flatness(grid, values) == pytest.approx(abs(values[-1] - values[49]) / values[-1])
    assert plateau_flatness(grid, np.zeros(100)) == math.inf


def test_summarize_temperature_sweep():
    grid = np.geomspace(0.01, 100.0, 50)
    j1 = 0.25 * grid / (grid + 0.01)
    summary = summarize_curve("delta=0.5", "t1", grid, j1, [""] * 50, kappa=1.0, delta=0.5)
    assert summary.monotone
    assert summary.points == 50
    assert summary.flagged == 0
    assert summary.plateau_over_kappa_delta2 == pytest.approx(1.0, rel=1e-3)
    assert summary.closed_form_constant == 0.5
    assert summary.caption_constant == 0.25
    assert summary.interior_maxima is None
    assert summary.as_dict()["curve"] == "delta=0.5"


def test_summarize_coupling_sweep_skips_failed_points():
    grid = np.geomspace(1e-3, 20.0, 100)
    j1 = grid ** 2 * np.exp(-4.0 * grid)
    j1[0] = math.nan
    flags = ["degenerate"] + [""] * 99
    summary = summarize_curve("t1=0.2", "delta", grid, j1, flags, kappa=1.0, delta=None)
    assert summary.flagged == 1
    assert summary.interior_maxima == 1
    assert summary.maxima_locations[0] == pytest.approx(0.5, rel=0.1)
    assert summary.tail_ratio < 1e-3
    assert summary.monotone is None


def test_summarize_all_failed():
    summary = summarize_curve("c", "t1", [0.1, 0.2], [math.nan, math.nan], ["degenerate", "degenerate"], 1.0, 0.5)
    assert math.isnan(summary.max_j1)
    assert summary.flagged == 2
