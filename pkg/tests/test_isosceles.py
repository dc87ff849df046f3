"""Tests for the aperture sweeps and the section on isosceles tone curves."""

import math

import numpy as np
import pytest

from trispec.fem import solve_extrapolated
from trispec.geometry import IsoscelesAperture
from trispec.isosceles import (
    SweepTable,
    default_grid,
    find_min,
    observation_crossing,
    right_triangle,
    scale_factor,
    sweep,
    verify_monotonicity,
    verify_right_family,
)

PI = math.pi


def test_scale_factor():
    assert scale_factor(0.5, "side", 2.0) == 4.0
    assert scale_factor(0.5, "diameter", 2.0) == 4.0  # equal sides dominate
    a = 2.0
    assert scale_factor(a, "diameter") == pytest.approx(
        4.0 * math.sin(a / 2.0) ** 2)
    assert scale_factor(a, "perimeter") == pytest.approx(
        (2.0 * (1.0 + math.sin(a / 2.0))) ** 2)
    assert scale_factor(a, "area") == pytest.approx(0.5 * math.sin(a))
    with pytest.raises(ValueError, match="scaling"):
        scale_factor(1.0, "volume")


def test_sweep_validation():
    with pytest.raises(ValueError, match="at least two"):
        sweep([1.0], "side", 6)
    with pytest.raises(ValueError, match="inside"):
        sweep([0.5, PI], "side", 6)
    with pytest.raises(ValueError, match="level"):
        sweep([0.5, 0.6], "side", 5)


def test_table_invariants():
    with pytest.raises(ValueError, match="increasing"):
        SweepTable([1.0, 1.0], [1, 1], [2, 2], [3, 3], "side")
    with pytest.raises(ValueError, match="positive"):
        SweepTable([1.0, 1.1], [1, -1], [2, 2], [3, 3], "side")
    with pytest.raises(ValueError, match="below"):
        SweepTable([1.0, 1.1], [2, 2], [1, 1], [3, 3], "side")
    with pytest.raises(ValueError, match="scaling"):
        SweepTable([1.0, 1.1], [1, 1], [2, 2], [3, 3], "volume")


def test_sweep_matches_figure_side():
    # figure-grid fixtures; their values carry FEM error of their own,
    # so one percent is the honest bar
    tab = sweep([PI / 6.0, PI / 3.0, PI / 2.0], "side", 6)
    fig = {
        PI / 6.0: (104.9618, 293.5534, 196.3239),
        PI / 3.0: (52.6405, 122.8361, 122.8361),
        PI / 2.0: (49.3512, 98.7107, 128.3272),
    }
    for i, a in enumerate(tab.alpha):
        l1, la, ls = fig[float(a)]
        assert tab.lambda1[i] == pytest.approx(l1, rel=0.01)
        assert tab.lambda_a[i] == pytest.approx(la, rel=0.01)
        assert tab.lambda_s[i] == pytest.approx(ls, rel=0.01)
    # dotted-line values are exact
    assert tab.lambda1[1] == pytest.approx(16.0 * PI ** 2 / 3.0, rel=1e-4)
    assert tab.lambda_a[1] == pytest.approx(112.0 * PI ** 2 / 9.0, rel=1e-4)
    assert tab.lambda_a[2] == pytest.approx(10.0 * PI ** 2, rel=1e-4)


def test_sweep_exact_values_other_scalings():
    tab = sweep([PI / 3.0, PI / 2.0], "area", 6)
    assert tab.lambda1[0] == pytest.approx(4.0 * PI ** 2 / math.sqrt(3.0),
                                           rel=1e-4)
    assert tab.lambda_s[0] == pytest.approx(
        28.0 * PI ** 2 / (3.0 * math.sqrt(3.0)), rel=1e-4)
    assert tab.lambda_a[1] == pytest.approx(5.0 * PI ** 2, rel=1e-4)
    # perimeter values from the same raw solves
    per = tab.rescaled("perimeter")
    assert per.lambda1[0] == pytest.approx(48.0 * PI ** 2, rel=1e-4)
    assert per.lambda_s[0] == pytest.approx(112.0 * PI ** 2, rel=1e-4)


def test_rescaled_matches_direct_sweep():
    grid = [0.7, 0.9, 1.2]
    side = sweep(grid, "side", 6)
    for scaling in ("diameter", "perimeter", "area"):
        direct = sweep(grid, scaling, 6)
        via = side.rescaled(scaling)
        assert np.allclose(via.lambda1, direct.lambda1, rtol=1e-12)
        assert np.allclose(via.lambda_a, direct.lambda_a, rtol=1e-12)
        assert np.allclose(via.lambda_s, direct.lambda_s, rtol=1e-12)


def test_csv_format():
    tab = sweep([0.8, 1.0], "side", 6)
    text = tab.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "# scaling: side"
    assert lines[1] == "alpha,lambda1,lambda_a,lambda_s"
    assert len(lines) == 4
    assert text == tab.to_csv()


def test_default_grid():
    g = default_grid()
    assert g[0] == pytest.approx(PI / 6.0)
    assert g[-1] == pytest.approx(2.0 * PI / 3.0)
    assert np.all(np.diff(g) > 0)
    # refined band around the equilateral aperture
    near = np.abs(g - PI / 3.0) < 0.05
    assert near.sum() >= 8
    with pytest.raises(ValueError):
        default_grid(2)


def test_find_min_figure_labels():
    # the five labeled minima of the tone curves; locations are compared
    # against the printed ones within the source plots' grid spacing
    h_fig = 0.0524
    tab = sweep(np.linspace(1.30, 1.44, 8), "side", 6)
    a, v = find_min(tab, "lambda1")
    assert v == pytest.approx(48.03, rel=0.01)
    assert abs(a - 1.3614) < h_fig

    tab = sweep(np.linspace(1.15, 1.31, 9), "side", 6)
    a, v = find_min(tab, "lambda_s")
    assert v == pytest.approx(120.04, rel=0.01)
    assert abs(a - 1.2243) < h_fig

    tab = sweep(np.linspace(0.77, 0.91, 8), "perimeter", 6)
    a, v = find_min(tab, "lambda_s")
    assert v == pytest.approx(1071.6, rel=0.01)
    assert abs(a - 0.8378) < h_fig

    tab = sweep(np.linspace(1.19, 1.33, 8), "perimeter", 6)
    a, v = find_min(tab, "lambda_a")
    assert v == pytest.approx(1073.7, rel=0.01)
    assert abs(a - 1.2566) < h_fig

    tab = sweep(np.linspace(0.54, 0.66, 7), "area", 6)
    a, v = find_min(tab, "lambda_s")
    assert v == pytest.approx(48.88, rel=0.01)
    assert abs(a - 0.596) < h_fig


def test_find_min_validation():
    tab = sweep(np.linspace(0.6, 0.9, 4), "side", 6)
    with pytest.raises(ValueError, match="edge"):
        find_min(tab, "lambda_a")  # decreasing through this window
    with pytest.raises(ValueError, match="column"):
        tab.column("lambda_x")


def test_monotonicity_report(fine_table):
    r = verify_monotonicity(fine_table)
    assert r["verdict"] == "pass"
    assert len(r["checks"]) == 15
    for c in r["checks"]:
        assert c["verdict"] == "pass", c["claim"]
    mirror = r["checks"][-1]
    assert mirror["pairs"] == 10
    assert mirror["lhs"] < 5e-4


def test_monotonicity_spacing_guard():
    tab = sweep(np.linspace(0.7, 1.0, 4), "side", 6)
    with pytest.raises(ValueError, match="spacing"):
        verify_monotonicity(tab)


def test_corner_at_equilateral_aperture():
    # one-sided slopes of the diameter-scaled fundamental tone differ
    # sharply at pi/3; slope estimation error is the second difference
    h = 0.012
    alphas = [PI / 3.0 + k * h for k in (-3, -2, -1, 1, 2, 3)]
    vals = []
    for a in alphas:
        lam, _, _ = solve_extrapolated(IsoscelesAperture(a).triangle, 1, 6)
        vals.append(float(lam[0]) * scale_factor(a, "diameter"))
    left = (vals[2] - vals[1]) / h
    right = (vals[4] - vals[3]) / h
    err = (abs(vals[2] - 2 * vals[1] + vals[0])
           + abs(vals[5] - 2 * vals[4] + vals[3])) / h
    assert abs(right - left) > 10.0 * err


def test_right_family():
    r = verify_right_family()
    assert r["verdict"] == "pass"
    for c in r["checks"]:
        assert c["verdict"] == "pass", c["claim"]
    with pytest.raises(ValueError, match="angles"):
        verify_right_family(grid=[0.1, 0.2])
    with pytest.raises(ValueError, match="smallest angle"):
        right_triangle(1.0)


def test_observation_crossing_default():
    r = observation_crossing()
    assert r["verdict"] == "pass"
    assert abs(r["crossing"] - PI / 3.0) < 0.04
    assert all(c["verdict"] == "pass" for c in r["checks"])


def test_observation_crossing_custom():
    r = observation_crossing(grid=[PI / 3.0 - 0.15, PI / 3.0 - 0.08,
                                   PI / 3.0 + 0.08, PI / 3.0 + 0.15],
                             level=6)
    assert r["verdict"] == "pass"
    assert abs(r["crossing"] - PI / 3.0) < 0.16
    with pytest.raises(ValueError, match="straddle"):
        observation_crossing(grid=[0.4, 0.5], level=6)
