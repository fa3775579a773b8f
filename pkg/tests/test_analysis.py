import math

import numpy as np
import pytest
from scipy.special import erf

from xycorr import analysis as A
from xycorr.errors import UsageError
from xycorr.xy import XYParams

WARM = XYParams.from_kT(1.0, 1.0, 0.1)


def _series(grid, values, base=WARM, name="synthetic"):
    return A.SweepSeries("lambda", grid, values, name, base)


def test_parse_grid_inclusive():
    g = A.parse_grid("0:2:401")
    assert g.size == 401 and g[0] == 0 and g[-1] == 2
    assert A.parse_grid("1.5:1.5:1").tolist() == [1.5]


@pytest.mark.parametrize("text", ["0:2", "a:b:3", "2:1:5", "0:1:0"])
def test_parse_grid_rejects(text):
    with pytest.raises(UsageError):
        A.parse_grid(text)


def test_resolve_measure_names():
    assert A.resolve_measure("wysim").name == "WYSIM"
    assert A.resolve_measure("lqc_LOWER(X)").name == "LQC_lower(x)"
    assert A.resolve_measure("LQC1(z)").single_spin
    with pytest.raises(UsageError, match="valid: MIN"):
        A.resolve_measure("entanglement")


def test_derivative_is_second_order():
    errs = []
    for n in (41, 81, 161):
        x = np.linspace(0, 1, n)
        d = A.numeric_derivative(_series(x, np.sin(3 * x)))
        errs.append(np.max(np.abs(d.values - 3 * np.cos(3 * x))))
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.15)
    assert errs[1] / errs[2] == pytest.approx(4, rel=0.15)


def test_derivative_exact_on_quadratics():
    x = np.linspace(-1, 2, 31)
    s = _series(x, 3 * x ** 2 - x + 2)
    np.testing.assert_allclose(A.numeric_derivative(s).values, 6 * x - 1, atol=1e-12)
    np.testing.assert_allclose(A.numeric_derivative(s, 2).values, 6, atol=1e-9)
    assert A.numeric_derivative(s, 2).meta["derivative_order"] == 2


def test_derivative_rejects_nonuniform_and_short():
    with pytest.raises(UsageError):
        A.numeric_derivative(_series(np.array([0, 1, 2, 4, 5.0]), np.zeros(5)))
    with pytest.raises(UsageError):
        A.numeric_derivative(_series(np.arange(4.0), np.zeros(4)))


def test_series_validation():
    with pytest.raises(UsageError):
        _series(np.array([0.0, 2.0, 1.0]), np.zeros(3))


def test_estimate_cp_finds_planted_extremum():
    x = np.linspace(0.8, 1.3, 501)
    rep = A.estimate_cp(_series(x, erf((x - 1.0237) / 0.05)))
    assert rep.found
    assert abs(rep.location - 1.0237) <= 0.001
    assert rep.meta["candidates"] == 1


def test_estimate_cp_prefers_candidate_nearest_centre():
    x = np.linspace(0.8, 1.3, 501)
    # two derivative peaks and the valley between them are all candidates
    v = erf((x - 0.82) / 0.02) + 0.5 * erf((x - 1.04) / 0.02)
    rep = A.estimate_cp(_series(x, v))
    assert rep.location == pytest.approx(1.04, abs=0.001)
    assert rep.meta["candidates"] == 3


def test_estimate_cp_random_plants():
    rng = np.random.default_rng(7)
    x = np.linspace(0.8, 1.3, 501)
    h = x[1] - x[0]
    for c in rng.uniform(0.85, 1.25, 20):
        rep = A.estimate_cp(_series(x, np.tanh((x - c) / 0.03)))
        assert abs(rep.location - c) <= h / 2 + 1e-12


def test_estimate_cp_without_extremum():
    x = np.linspace(0.8, 1.3, 101)
    rep = A.estimate_cp(_series(x, x ** 2))
    assert not rep.found and math.isnan(rep.location)


def test_estimate_cp_refuses_zero_temperature():
    x = np.linspace(0.8, 1.3, 101)
    with pytest.raises(UsageError):
        A.estimate_cp(_series(x, x, base=XYParams(1.0, 1.0)))


def test_detect_jump_finds_planted_step():
    x = np.linspace(0, 2, 401)
    v = np.sin(x) + np.where(x > 1.2345, 0.3, 0.0)
    reps = A.detect_jump(_series(x, v))
    assert len(reps) == 1
    assert abs(reps[0].location - 1.2345) <= x[1] - x[0]


def test_detect_jump_finds_derivative_kink():
    x = np.linspace(0, 2, 401)
    s = _series(x, np.cos(x) + 0.2 * np.abs(x - 0.7))
    reps = A.detect_jump(A.numeric_derivative(s))
    assert [round(r.location, 2) for r in reps] == [0.7]


@pytest.mark.parametrize("v", [
    lambda x: x ** 3 - 2 * x,
    lambda x: np.exp(-((x - 1) / 0.1) ** 2),
    lambda x: np.log1p(x) * np.cos(4 * x),
], ids=["cubic", "gaussian", "oscillating"])
def test_detect_jump_no_false_positives(v):
    x = np.linspace(0, 2, 401)
    assert A.detect_jump(_series(x, v(x))) == []
    assert A.detect_jump(A.numeric_derivative(_series(x, v(x)))) == []


def test_zero_crossings():
    x = np.linspace(0, 3, 301)
    reps = A.zero_crossings(_series(x, np.cos(2 * x)))
    assert len(reps) == 2
    np.testing.assert_allclose([r.location for r in reps], [np.pi / 4, 3 * np.pi / 4], atol=1e-4)


def test_optimizer_switches():
    reps = A.optimizer_switches([0, 1, 2, 3], ["z", "z", "x", "x"])
    assert len(reps) == 1
    assert reps[0].location == 1.5 and reps[0].meta == {"from": "z", "to": "x"}


def test_sweep_many_matches_single_sweeps():
    grid = np.linspace(0.5, 1.5, 5)
    base = XYParams.from_kT(1.0, 0.5, 0.2)
    both = A.sweep_many(["MIN", "concurrence"], base, grid)
    np.testing.assert_array_equal(both["MIN"].values, A.sweep("MIN", base, grid).values)
    np.testing.assert_array_equal(both["concurrence"].values, A.sweep("concurrence", base, grid).values)


def test_long_range_scan_shape():
    out = A.long_range_scan(XYParams.from_kT(1.5, 1.0, 0.1), 6, ["MIN", "LQC1(x)"])
    assert out["MIN"].grid.tolist() == [1, 2, 3, 4, 5, 6]
    assert out["MIN"].parameter == "r"
    # single-spin measures do not depend on the separation
    assert np.ptp(out["LQC1(x)"].values) == 0


def test_known_special_points():
    assert A.known_special_points(1.0) == [1.0]
    assert A.known_special_points(0.5)[1] == pytest.approx(2 / math.sqrt(3))


def test_zero_temperature_derivative_grows_at_critical_field():
    base = XYParams(1.0, 1.0)
    peaks = []
    for n in (101, 201, 401, 801):
        s = A.sweep("MIN", base, np.linspace(0.8, 1.3, n))
        d = np.abs(A.numeric_derivative(s).values)
        peaks.append(d[np.argmin(np.abs(s.grid - 1.0))])
    assert all(b > a for a, b in zip(peaks, peaks[1:]))
