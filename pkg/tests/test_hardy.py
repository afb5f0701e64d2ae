import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compop.errors import TruncationTooLoose
from compop.hardy import (
    DIVERGENT,
    FINITE,
    change_of_variables_check,
    h2_power_norm,
    inner_transform,
    littlewood_paley_check,
    poisson_transform,
    poisson_transform_batch,
    poisson_transform_series,
    poisson_transform_series_auto,
    power_series_chain,
    power_sum_tail,
)
from compop.mapspec import RATIONAL_CATALOG, SelfMap


def m(spec):
    return SelfMap.from_spec(spec)


def test_power_norm_examples():
    for n in (1, 3, 7):
        assert h2_power_norm(m("monomial(2)"), n) == pytest.approx(1, abs=1e-12)
        assert h2_power_norm(m("scale(0.5, identity)"), n) == pytest.approx(4.0**-n, rel=1e-10)
    assert h2_power_norm(m("const(0.3)"), 2) == pytest.approx(0.0081, rel=1e-12)


def test_power_sum_tail_examples():
    t = power_sum_tail(m("scale(0.5, identity)"), 4)
    assert t.status == FINITE and t.tail_bound == pytest.approx(4.0**-4 / 0.75, rel=1e-9)
    assert t.total == pytest.approx(4 / 3, rel=1e-9)
    assert power_sum_tail(m("monomial(3)"), 4).status == DIVERGENT
    assert power_sum_tail(m("const(0.3)"), 2).tail_bound == pytest.approx(0.0081 / 0.91, rel=1e-9)


def test_poisson_examples():
    for a in (0.2, 0.7j, -0.9 + 0.1j):
        assert poisson_transform(m("identity"), a) == pytest.approx(1, abs=1e-8)
        assert poisson_transform(m("const(0)"), a) == pytest.approx(1 - abs(a) ** 2, abs=1e-12)
    for r in (0.3, 0.9, 0.99):
        assert poisson_transform(m("halfplane"), r) == pytest.approx(1 + r, rel=1e-8)


@pytest.mark.parametrize("spec", ["monomial(2)", "monomial(3)", "blaschke(0, 0.5)", "identity"])
def test_inner_fixing_zero(spec):
    a = 0.999 * np.exp(1j * np.linspace(0, 2 * np.pi, 7, endpoint=False))
    vals, _ = poisson_transform_batch(m(spec), np.concatenate([[0, 0.5, -0.9j], a]))
    np.testing.assert_allclose(vals, 1, atol=1e-8)


@pytest.mark.parametrize("spec", ["mobius(0.5)", "compose(monomial(2), mobius(0.3+0.1i))"])
def test_inner_oracle(spec):
    psi = m(spec)
    for a in (0.3, 0.8j, 0.95):
        assert poisson_transform(psi, a) == pytest.approx(inner_transform(psi.psi0, a), rel=1e-8)


def test_batch_matches_scalar():
    psi = m("poly(0, 0.5, 0.5)")
    a = np.array([0.1, 0.5j, 0.9, -0.95 + 0.1j])
    vals, done = poisson_transform_batch(psi, a)
    assert np.all(done)
    np.testing.assert_allclose(vals, [poisson_transform(psi, x) for x in a], rtol=1e-8)


def test_series_examples():
    assert poisson_transform_series(m("monomial(2)"), 0.5, 64).value == pytest.approx(1, abs=1e-10)
    assert poisson_transform_series(m("const(0)"), 0.6, 1).value == pytest.approx(0.64, abs=1e-14)
    assert poisson_transform_series(m("identity"), 0.5, 64).value == pytest.approx(1, abs=1e-10)
    with pytest.raises(TruncationTooLoose):
        poisson_transform_series(m("identity"), 0.99, 4)


@pytest.mark.parametrize("spec", RATIONAL_CATALOG)
def test_series_agrees_with_quadrature(spec):
    psi = m(spec)
    for a in (0.3, 0.6j, 0.8, 0.95):
        s = poisson_transform_series_auto(psi, a)
        assert abs(s.value - poisson_transform(psi, a)) < 1e-7


def test_littlewood_paley_examples():
    c = littlewood_paley_check(m("const(0.3)"), 0.5)
    assert c.rhs == pytest.approx(0.75 / 0.7225, abs=1e-12) and c.lhs == pytest.approx(c.rhs, abs=1e-12)
    assert littlewood_paley_check(m("monomial(2)"), 0.5).rel_err < 1e-6
    c = littlewood_paley_check(m("identity"), 0.7)
    assert c.lhs == pytest.approx(1, abs=1e-9) and abs(c.rhs - 1) < 1e-6


@pytest.mark.parametrize("spec", RATIONAL_CATALOG)
def test_littlewood_paley_catalog(spec):
    for a in (0.3, 0.9, 0.5 + 0.5j):
        assert littlewood_paley_check(m(spec), a).rel_err < 1e-6


def test_change_of_variables():
    assert change_of_variables_check(m("identity"), 0.5).abs_err < 1e-8
    assert change_of_variables_check(m("monomial(2)"), 0.5).abs_err < 1e-4
    assert change_of_variables_check(m("blaschke(0, 0.5)"), 0.3 + 0.2j).abs_err < 1e-4


def test_power_series_chain():
    out = power_series_chain(m("scale(0.5, identity)"), [0.5, 0.9, 0.99, 0.999], 4)
    assert out["holds"]
    assert np.all(out["lhs"] <= out["rhs"] + 1e-12)
    # the first term dies as |a| -> 1, leaving the side below 2 eps
    assert out["lhs"][-1] < 2 * out["eps"]


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 0.99), st.floats(0, 2 * np.pi), st.floats(0, 0.95), st.floats(0, 2 * np.pi))
def test_inner_transform_matches_mobius(rc, tc, ra, ta):
    c, a = rc * np.exp(1j * tc), ra * np.exp(1j * ta)
    # the automorphism exchanging 0 and c is inner with psi(0) = c
    psi = SelfMap.from_spec(f"mobius({c.real:.12f}{c.imag:+.12f}i)")
    vals, _ = poisson_transform_batch(psi, [a])
    assert vals[0] == pytest.approx(inner_transform(psi.psi0, a), rel=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(RATIONAL_CATALOG), st.floats(0, 0.95), st.floats(0, 2 * np.pi))
def test_poisson_transform_bounds(spec, r, t):
    psi = m(spec)
    a = r * np.exp(1j * t)
    v = poisson_transform_batch(psi, [a])[0][0]
    # Poisson kernel bounds at psi(e^{it}) in the closed disk
    assert (1 - r) / (1 + r) - 1e-9 <= v <= (1 + r) / (1 - r) + 1e-9
