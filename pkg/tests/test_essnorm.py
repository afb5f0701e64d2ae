import numpy as np
import pytest

from compop.essnorm import (
    COMPACT,
    INCONCLUSIVE,
    NONCOMPACT,
    default_schedule,
    essential_norm_report,
    identity_check,
    integral_profile,
    report_from_json,
    report_to_csv,
    reports_equal,
    verdict_from_profiles,
)
from compop.hardy import FINITE, power_sum_tail
from compop.mapspec import CATALOG, RATIONAL_CATALOG, SelfMap


def m(spec):
    return SelfMap.from_spec(spec)


def test_schedule():
    s = default_schedule(10)
    assert s[0] == 0.5 and s[-1] == 0.9990234375
    with pytest.raises(ValueError):
        default_schedule(0)


def test_integral_profile_examples():
    r = [0.5, 0.9, 0.99]
    np.testing.assert_allclose(integral_profile(m("monomial(2)"), r).values, 1, atol=1e-8)
    np.testing.assert_allclose(integral_profile(m("const(0)"), r).values, 1 - np.square(r), atol=1e-12)
    hp = integral_profile(m("halfplane"), r)
    np.testing.assert_allclose(hp.values, 1 + np.array(r), rtol=1e-6)


def test_identity_check_examples():
    c = identity_check(m("monomial(2)"), 0.999)
    assert c["counting_side"] == pytest.approx(-np.log(0.999) / 0.001, abs=1e-6)
    assert c["integral_side"] == pytest.approx(1, abs=1e-8)
    assert c["gap"] <= 1e-2
    c = identity_check(m("halfplane"), 0.999)
    assert abs(c["counting_side"] - 2) < 1e-2 and abs(c["integral_side"] - 2) < 1e-2


def test_identity_check_compact_map():
    r = 0.9
    c = identity_check(m("scale(0.5, identity)"), r)
    assert c["counting_side"] == 0
    # the sup over |a| = r sits at real a
    assert c["integral_side"] == pytest.approx((1 - r * r) / (1 - r * r / 4), rel=1e-7)


@pytest.mark.parametrize("spec", RATIONAL_CATALOG)
def test_gap_at_extreme_radius(spec):
    c = identity_check(m(spec), 0.999)
    value = max(c["counting_side"], c["integral_side"])
    assert c["gap"] <= max(0.02, 0.02 * value)


def test_verdict_rules():
    assert verdict_from_profiles([0.3, 0.04, 0.03, 0.02], [0.2, 0.04, 0.03, 0.01]) == COMPACT
    assert verdict_from_profiles([1.2, 1.0, 1.0, 1.0], [1, 1, 1, 1]) == NONCOMPACT
    assert verdict_from_profiles([0.2, 0.2, 0.2], [0.2, 0.2, 0.2]) == INCONCLUSIVE
    assert verdict_from_profiles([0.04, 0.03], [0.04, 0.03]) == INCONCLUSIVE
    assert verdict_from_profiles([0.04, 0.03, 0.035], [0.04, 0.03, 0.02]) == INCONCLUSIVE
    assert verdict_from_profiles([1, 1, np.nan], [1, 1, 1]) == INCONCLUSIVE


@pytest.mark.parametrize("spec,expected", [(s, v) for s, v, _ in CATALOG if not s.startswith("atomic")])
def test_catalog_verdicts(spec, expected):
    rep = essential_norm_report(m(spec))
    assert rep.verdict == expected
    psi = m(spec)
    if psi.is_inner and psi.fixes_zero:
        np.testing.assert_allclose(rep.integral_values, 1, atol=1e-8)
    if power_sum_tail(psi, 8).status == FINITE:
        assert rep.verdict == COMPACT


@pytest.mark.parametrize("spec", ["const(0.3)", "const(0)", "scale(0.5, identity)", "scale(0.5, monomial(2))"])
def test_monotone_profiles(spec):
    v = integral_profile(m(spec), default_schedule(8)).values
    assert np.all(np.diff(v) <= 0)


def test_report_round_trip_and_determinism():
    a = essential_norm_report(m("halfplane"), default_schedule(6), carleson=True)
    b = essential_norm_report(m("halfplane"), default_schedule(6), carleson=True)
    assert a.to_json() == b.to_json()
    assert reports_equal(report_from_json(a.to_json()), a)
    assert report_to_csv(a).splitlines()[0] == "radius,counting,integral,gap"
    assert a.runtime_seconds is None
    assert essential_norm_report(m("halfplane"), default_schedule(3), timing=True).runtime_seconds > 0


def test_empty_schedule():
    with pytest.raises(ValueError):
        essential_norm_report(m("identity"), [])


def test_atomic_report():
    # singular boundary point: both sides are best effort, the verdict is not
    rep = essential_norm_report(m("atomic(1)"))
    assert rep.verdict == NONCOMPACT
    exact = (1 + np.exp(-1)) / (1 - np.exp(-1))
    assert abs(rep.counting_values[-1] - exact) < 0.05 * exact
    assert abs(rep.essnorm_sq_estimate - exact) < 0.05 * exact
