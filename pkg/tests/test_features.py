import numpy as np
import pytest

from nhksea.errors import InvalidParameterError
from nhksea.features import detect_features, second_difference
from nhksea.util import inclusive_range, parallel_map, resolve_threads


def test_second_difference():
    np.testing.assert_allclose(second_difference([0, 1, 4, 9, 16]), [2, 2, 2])


def test_detects_abs_kink():
    x = np.linspace(0, 2, 401)
    y = np.abs(x - 1.2345) + 0.1 * np.sin(x)
    f = detect_features(x, y)
    assert len(f) == 1 and abs(f[0].position - 1.2345) < 0.005


def test_apex_refinement_beats_grid():
    x = np.linspace(0, 5, 501)
    y = np.abs(np.sin(2.0 * (x - 1.2345)))
    f = detect_features(x, y, refine="apex", merge_gap=0.15)
    ref = 1.2345 + np.pi / 2 * np.arange(3)
    got = np.array([c.position for c in f])
    assert len(got) == 3
    assert np.max(np.abs(got - ref)) < 1e-3


def test_smooth_curve_has_no_features():
    x = np.linspace(0, 10, 1001)
    assert detect_features(x, np.sin(x) + 0.01 * x**2) == []


def test_non_finite_samples_become_features():
    x = np.linspace(0, 1, 101)
    y = x.copy()
    y[40] = np.inf
    f = detect_features(x, y)
    assert len(f) == 1 and f[0].index == 40 and f[0].strength == np.inf


def test_inclusive_range():
    assert len(inclusive_range(0.2, 2.0, 0.05)) == 37
    assert inclusive_range(0, 1, 0.3)[-1] == pytest.approx(0.9)
    with pytest.raises(InvalidParameterError):
        inclusive_range(0, 1, -0.1)


def test_threads(monkeypatch):
    monkeypatch.delenv("NONHERM_THREADS", raising=False)
    assert resolve_threads() == 1
    monkeypatch.setenv("NONHERM_THREADS", "5")
    assert resolve_threads() == 5 and resolve_threads(2) == 2
    assert parallel_map(lambda v: v * v, range(20), threads=4) == [v * v for v in range(20)]
