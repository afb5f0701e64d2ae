"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a single PASS/FAIL line that is printed in the
terminal summary (and immediately with ``-s``).
"""
import time

import numpy as np
import pytest

from compop.carleson import carleson_ratio_profile, induced_measure, poisson_of_measure
from compop.diskzeros import solve_preimages
from compop.essnorm import COMPACT, NONCOMPACT, DEFAULT_H_GRID, default_schedule, essential_norm_report, identity_check
from compop.hardy import change_of_variables_check, littlewood_paley_check, poisson_transform, power_series_chain, power_sum_tail
from compop.mapspec import RATIONAL_CATALOG, SelfMap
from compop.nevanlinna import counting_function, counting_transform_check, littlewood_bound, moebius_apply
from compop.quad import energy_series_value, moebius_energy

from conftest import ACCEPTANCE_LINES


def record(n, title, ok, detail):
    line = f"criterion {n:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def m(spec):
    return SelfMap.from_spec(spec)


def test_criterion_01_inner_maps_fixing_zero():
    radii = [0, 0.3, 0.6, 0.9, 0.99, 0.999]
    angles = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    grid = [r * np.exp(1j * t) for r in radii for t in angles]
    worst, slowest, verdicts = 0.0, 0.0, {}
    for spec in ("monomial(2)", "monomial(3)", "blaschke(0, 0.5)"):
        t0 = time.perf_counter()
        psi = m(spec)
        worst = max(worst, max(abs(poisson_transform(psi, a) - 1) for a in grid))
        verdicts[spec] = essential_norm_report(psi).verdict
        slowest = max(slowest, time.perf_counter() - t0)
    ok = worst <= 1e-8 and all(v == NONCOMPACT for v in verdicts.values()) and slowest < 10
    record(1, "inner maps fixing 0", ok, f"max |I(a) - 1| = {worst:.2e}, verdicts {set(verdicts.values())}, slowest map {slowest:.1f} s")


def test_criterion_02_finite_radius_identity():
    r = 0.999
    t0 = time.perf_counter()
    hp = identity_check(m("halfplane"), r)
    mo = identity_check(m("monomial(2)"), r)
    elapsed = time.perf_counter() - t0
    closed_c, closed_i = -np.log(2 * r - 1) / (1 - r), 1 + r
    ok = (
        abs(hp["counting_side"] - closed_c) <= 1e-6 * closed_c
        and abs(hp["integral_side"] - closed_i) <= 1e-6 * closed_i
        and abs(hp["counting_side"] - 2) <= 2e-2
        and abs(hp["integral_side"] - 2) <= 2e-2
        and hp["gap"] <= 2e-2
        and abs(mo["counting_side"] - 1) <= 1e-2
        and abs(mo["integral_side"] - 1) <= 1e-2
        and elapsed < 60
    )
    record(2, "finite-radius identity", ok,
           f"halfplane {hp['counting_side']:.6f} / {hp['integral_side']:.6f}, "
           f"monomial(2) {mo['counting_side']:.6f} / {mo['integral_side']:.6f}, {elapsed:.1f} s")


def test_criterion_03_geometric_power_sum():
    psi = m("scale(0.5, identity)")
    total = power_sum_tail(psi, 16).total
    chain = power_series_chain(psi, [0.5, 0.9, 0.99, 0.999, 0.9999], 4)
    rep = essential_norm_report(psi, np.append(default_schedule(9), 0.999))
    c_last, i_last = rep.counting_values[-1], rep.integral_values[-1]
    ok = (abs(total - 4 / 3) <= 1e-12 and chain["holds"] and chain["lhs"][-1] < 2 * chain["eps"]
          and rep.verdict == COMPACT and c_last < 1e-3 and i_last < 1e-3)
    record(3, "summable power norms", ok,
           f"sum = {total:.15f}, chain holds {chain['holds']}, verdict {rep.verdict}, "
           f"profiles at r=0.999: counting {c_last:.3g}, integral {i_last:.3g}")


def test_criterion_04_littlewood_paley():
    t0 = time.perf_counter()
    avals = [0.3, 0.5, 0.7, 0.9, 0.4 + 0.5j, -0.6j]
    worst = max(littlewood_paley_check(m(s), a).rel_err for s in RATIONAL_CATALOG for a in avals)
    elapsed = time.perf_counter() - t0
    record(4, "Littlewood-Paley identity", worst < 1e-6 and elapsed < 30, f"max rel_err {worst:.2e} in {elapsed:.1f} s")


def test_criterion_05_change_of_variables():
    worst = max(change_of_variables_check(m(s), a).abs_err
                for s in ("identity", "monomial(2)", "blaschke(0, 0.5)") for a in (0.5, 0.3 + 0.2j))
    record(5, "change of variables", worst < 1e-4, f"max abs_err {worst:.2e}")


def test_criterion_06_energy_series():
    grid = np.round(np.arange(0.05, 0.951, 0.05), 2)
    agree = max(abs(v.closed_form - v.partial_sum) for v in map(energy_series_value, grid))
    v09 = energy_series_value(0.9).closed_form
    v0999 = energy_series_value(0.999).closed_form
    ok = agree < 1e-12 and abs(v09 - 0.2463635) <= 1e-6 and v0999 < 0.01
    record(6, "energy series", ok, f"closed vs partial {agree:.1e}, S(0.9) = {v09:.9f}, S(0.999) = {v0999:.6f}")


def test_criterion_07_moebius_energy():
    vals = {a: moebius_energy(a) for a in (0, 0.6 + 0.2j, 0.9)}
    worst = max(abs(v.quadrature - v.closed_form) for v in vals.values())
    zero = vals[0]
    ok = worst < 1e-6 and zero.closed_form == 0.5 and abs(zero.quadrature - 0.5) < 1e-14
    record(7, "Moebius energy", ok, f"max |quadrature - closed form| {worst:.1e}, a=0 gives {zero.closed_form!r}")


def test_criterion_08_carleson_coherence():
    hs = DEFAULT_H_GRID
    parts, ok = [], True
    for spec in ("scale(0.5, identity)", "const(0.3)"):
        mu = induced_measure(m(spec), 2**15)
        ratio = carleson_ratio_profile(mu, hs).values[-1]
        pois = poisson_of_measure(mu, 0.999)
        ok &= ratio < 1e-3 and pois < 1e-3
        parts.append(f"{spec} ratio {ratio:.2g} poisson {pois:.3g}")
    mu = induced_measure(m("identity"), 2**15)
    ratios = carleson_ratio_profile(mu, hs).values
    pois = min(poisson_of_measure(mu, r) for r in (0.9, 0.99, 0.999))
    ok &= bool(np.all(np.abs(ratios * np.pi - 1) <= 0.02)) and pois >= 0.99
    parts.append(f"identity ratio in [{ratios.min():.4f}, {ratios.max():.4f}] poisson >= {pois:.4f}")
    mu = induced_measure(m("halfplane"), 2**15)
    ratios = carleson_ratio_profile(mu, hs).values
    pois = min(poisson_of_measure(mu, r) for r in (0.9, 0.99, 0.999))
    ok &= bool(np.all(ratios >= 0.2)) and pois >= 0.2
    parts.append(f"halfplane ratio >= {ratios.min():.3f} poisson >= {pois:.3f}")
    record(8, "Carleson coherence", bool(ok), "; ".join(parts))


def test_criterion_09_transform_law():
    maps = ["monomial(2)", "blaschke(0, 0.5)", "halfplane", "poly(0, 0.5, 0.5)", "compose(monomial(2), mobius(0.3+0.1i))"]
    avals = [0, 0.5, -0.3j, 0.6 + 0.2j, 0.9]
    wvals = [0.1, -0.4j, 0.7, 0.2 + 0.5j, -0.85]
    worst, n = 0.0, 0
    for spec in maps:
        psi = m(spec)
        for a in avals:
            for w in wvals:
                if abs(w - moebius_apply(a, psi.psi0)) < 1e-9:
                    continue
                worst = max(worst, counting_transform_check(psi, a, w)["diff"])
                n += 1
    g = np.random.default_rng(2)
    lw_ok, n_lw = True, 0
    for spec in maps + ["mobius(0.5)", "const(0.3)", "scale(0.5, identity)", "atomic(1)"]:
        psi = m(spec)
        for w in 0.95 * np.sqrt(g.uniform(size=40)) * np.exp(2j * np.pi * g.uniform(size=40)):
            if abs(w - psi.psi0) < 1e-6:
                continue
            lw_ok &= counting_function(psi, w).value <= littlewood_bound(psi, w) + 1e-9
            n_lw += 1
    record(9, "counting-function transform law", worst < 1e-8 and lw_ok,
           f"max diff {worst:.1e} over {n} triples; Littlewood bound held at {n_lw} points: {lw_ok}")


def test_criterion_10_preimage_certification():
    g = np.random.default_rng(10)
    bad, worst, count = 0, 0.0, 0
    for d in range(2, 6):
        zeros = 0.95 * np.sqrt(g.uniform(size=d)) * np.exp(2j * np.pi * g.uniform(size=d))
        psi = m("blaschke(" + ", ".join(f"{z.real:.17g}{z.imag:+.17g}i" for z in zeros) + ")")
        for w in 0.98 * np.sqrt(g.uniform(size=100)) * np.exp(2j * np.pi * g.uniform(size=100)):
            p = solve_preimages(psi, w)
            bad += p.total != d
            worst = max(worst, float(np.max(np.abs(psi(p.roots) - w))))
            count += 1
    record(10, "preimage certification", bad == 0 and worst <= 1e-10,
           f"{count} targets, multiplicity mismatches {bad}, max residual {worst:.1e}")
