import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compop.quad import (
    QuadConfig,
    circle_integral,
    disk_integral,
    energy_series_closed_form,
    energy_series_value,
    moebius_energy,
)


def test_circle_examples():
    assert circle_integral(lambda t: 1 + 0 * t) == pytest.approx(1, abs=1e-14)
    assert circle_integral(lambda t: 0.19 / np.abs(1 - 0.9 * np.exp(1j * t)) ** 2) == pytest.approx(1, abs=1e-9)
    assert circle_integral(lambda t: 1 / np.abs(1 - 0.5 * np.exp(1j * t)) ** 2) == pytest.approx(4 / 3, abs=1e-9)


def test_disk_examples():
    assert disk_integral(lambda z: 1 + 0 * z.real) == pytest.approx(1, abs=1e-13)
    assert disk_integral(lambda z: np.abs(z) ** 2) == pytest.approx(0.5, abs=1e-13)


@pytest.mark.parametrize("k", range(8))
def test_disk_radial_polynomials(k):
    assert disk_integral(lambda z: np.abs(z) ** (2 * k)) == pytest.approx(1 / (k + 1), abs=1e-10)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=0)
    with pytest.raises(ValueError):
        QuadConfig(max_nodes=2**30)


def test_energy_series_examples():
    assert energy_series_value(0).closed_form == 0.5
    v = energy_series_value(0.9)
    assert v.closed_form == pytest.approx(0.2463635, abs=1e-6)
    assert abs(v.closed_form - v.partial_sum) < 1e-12
    assert energy_series_value(0.99).closed_form > energy_series_value(0.999).closed_form


def test_energy_series_grid():
    grid = np.round(np.arange(0.05, 0.951, 0.05), 2)
    vals = []
    for c in grid:
        v = energy_series_value(c)
        assert abs(v.closed_form - v.partial_sum) < 1e-12
        vals.append(v.closed_form)
    assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("a", [0, 0.3, 0.6 + 0.2j, 0.9])
def test_moebius_energy(a):
    e = moebius_energy(a)
    assert abs(e.quadrature - e.closed_form) < 1e-6
    if a == 0:
        assert e.closed_form == 0.5


def test_moebius_energy_values():
    assert moebius_energy(0.9).closed_form == pytest.approx(0.1431909, abs=1e-6)
    assert moebius_energy(0.99).closed_form < moebius_energy(0.9).closed_form


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.99), st.floats(0, 2 * np.pi))
def test_poisson_kernel_unit_mean(r, t):
    a = r * np.exp(1j * t)
    cfg = QuadConfig()
    v = circle_integral(lambda th: (1 - r * r) / np.abs(1 - np.conj(a) * np.exp(1j * th)) ** 2, cfg)
    assert abs(v - 1) <= cfg.tol(1) * 10


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.999))
def test_energy_series_in_range(c):
    v = energy_series_closed_form(c)
    assert 0 < v <= 0.5 + 1e-15
