import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compop.errors import InfiniteValue
from compop.mapspec import CATALOG, RATIONAL_CATALOG, SelfMap
from compop.nevanlinna import (
    AngleBudget,
    compose_with_moebius,
    counting_function,
    counting_profile,
    counting_transform_check,
    littlewood_bound,
    moebius_apply,
    subaveraging_check,
)

from conftest import CATALOG_SPECS


def test_counting_examples():
    assert counting_function(SelfMap.from_spec("monomial(2)"), 0.25).value == pytest.approx(-2 * np.log(0.5), abs=1e-12)
    assert counting_function(SelfMap.from_spec("const(0.3)"), 0.7).value == 0
    assert counting_function(SelfMap.from_spec("halfplane"), 0.9).value == pytest.approx(-np.log(0.8), abs=1e-12)


def test_infinite_at_psi0():
    with pytest.raises(InfiniteValue):
        counting_function(SelfMap.from_spec("mobius(0.5)"), 0.5)


def test_profile_examples():
    v = counting_profile(SelfMap.from_spec("monomial(2)"), [0.99]).last
    assert v == pytest.approx(-np.log(0.99) / 0.01, abs=1e-9)
    assert counting_profile(SelfMap.from_spec("scale(0.5, identity)"), [0.75]).last == 0
    hp = counting_profile(SelfMap.from_spec("halfplane"), [0.999])
    assert abs(hp.last - 2) < 1e-2
    assert abs(hp.argmax_angles[0]) < 1e-3 or abs(hp.argmax_angles[0] - 2 * np.pi) < 1e-3


def test_angle_budget():
    b = AngleBudget()
    assert b.n_angles(0.5) == 256
    assert b.n_angles(0.999) == 8000
    assert b.n_angles(1 - 1e-9) == 2**16


@pytest.mark.parametrize("spec", ["identity", "monomial(2)", "monomial(3)", "blaschke(0, 0.5)"])
def test_inner_fixing_zero_profile(spec):
    assert 0.99 <= counting_profile(SelfMap.from_spec(spec), [0.999]).last <= 1.01


def test_moebius_apply_examples():
    assert moebius_apply(0.5, 0.5) == 0
    assert moebius_apply(0, 0.3 + 0.1j) == -(0.3 + 0.1j)
    assert moebius_apply(0.5, moebius_apply(0.5, 0)) == pytest.approx(0, abs=1e-15)


def test_compose_with_moebius_examples():
    z = np.array([0.1, 0.3j, -0.6 + 0.2j])
    np.testing.assert_allclose(compose_with_moebius(0, SelfMap.from_spec("identity"))(z), -z, atol=1e-15)
    psi = SelfMap.from_spec("mobius(0.3+0.2i)")
    assert abs(compose_with_moebius(psi.psi0, psi)(0)) < 1e-15
    np.testing.assert_allclose(compose_with_moebius(0.5, SelfMap.from_spec("monomial(2)"))(z),
                               (0.5 - z**2) / (1 - 0.5 * z**2), atol=1e-15)


def test_transform_examples():
    for spec in ["monomial(2)", "halfplane", "poly(0, 0.5, 0.5)"]:
        assert counting_transform_check(SelfMap.from_spec(spec), 0, 0.3 - 0.1j)["diff"] < 1e-9
    assert counting_transform_check(SelfMap.from_spec("monomial(2)"), 0.5, 0.3)["diff"] < 1e-9
    assert counting_transform_check(SelfMap.from_spec("mobius(0.3)"), 0.5, 0.1)["diff"] < 1e-12


def test_transform_grid():
    maps = ["monomial(2)", "blaschke(0, 0.5)", "halfplane", "poly(0, 0.5, 0.5)", "mobius(0.5)"]
    avals = [0, 0.5, -0.3j, 0.6 + 0.2j, 0.9]
    wvals = [0.1, -0.4j, 0.7, 0.2 + 0.5j, -0.85]
    for spec in maps:
        psi = SelfMap.from_spec(spec)
        for a in avals:
            for w in wvals:
                assert counting_transform_check(psi, a, w)["diff"] < 1e-8


def test_subaveraging_examples():
    r = subaveraging_check(SelfMap.from_spec("identity"), 0.5)
    assert r["bound"] == pytest.approx(0.25 * -np.log(0.5), abs=1e-9)
    assert r["ok"]
    r = subaveraging_check(SelfMap.from_spec("const(0.3)"), 0.6)
    assert r["bound"] == 0 and r["ok"]
    assert subaveraging_check(SelfMap.from_spec("monomial(2)"), 0.7)["ok"]


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_littlewood_and_nonnegative(spec):
    psi = SelfMap.from_spec(spec)
    g = np.random.default_rng(5)
    ws = 0.95 * np.sqrt(g.uniform(size=100)) * np.exp(2j * np.pi * g.uniform(size=100))
    for w in ws:
        if abs(w - psi.psi0) < 1e-6:
            continue
        n = counting_function(psi, w).value
        assert n >= 0
        assert n <= littlewood_bound(psi, w) + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(RATIONAL_CATALOG), st.floats(0, 0.9), st.floats(0, 2 * np.pi), st.floats(0, 0.9), st.floats(0, 2 * np.pi))
def test_transform_law_property(spec, ra, ta, rw, tw):
    psi = SelfMap.from_spec(spec)
    a, w = ra * np.exp(1j * ta), rw * np.exp(1j * tw)
    if psi.degree == 0 or abs(w - moebius_apply(a, psi.psi0)) < 1e-6:
        return
    assert counting_transform_check(psi, a, w)["diff"] < 1e-8
