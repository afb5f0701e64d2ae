"""Nevanlinna counting function, its radial profiles and Moebius transform laws."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .diskzeros import BOUNDARY_FLAG, _is_atomic_form, solve_preimages, solve_preimages_batch
from .errors import InfiniteValue, NoConvergenceWarning
from .mapspec import Compose, Mobius, Scale, SelfMap, as_selfmap
from .mapspec.expr import AtomicInner
from .quad import DEFAULT_CONFIG, QuadConfig, disk_integral

GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class CountingValue:
    w: complex
    value: float
    n_preimages: int
    flagged_boundary_mass: float = 0.0


@dataclass(frozen=True)
class AngleBudget:
    """Angle grid per radius: n(r) = max(min_angles, ceil(per_gap / (1 - r))), capped."""

    min_angles: int = 256
    per_gap: float = 8.0
    max_angles: int = 2**16
    refine_rounds: int = 3
    steps_per_round: int = 8

    def __post_init__(self):
        if self.min_angles < 64:
            raise ValueError("angle budget must allow at least 64 angles")
        if self.max_angles < self.min_angles:
            raise ValueError("max_angles < min_angles")
        if self.refine_rounds < 0 or self.steps_per_round < 1:
            raise ValueError("bad refinement settings")

    def n_angles(self, r: float) -> int:
        n = max(self.min_angles, math.ceil(self.per_gap / (1 - r)))
        return int(min(n, self.max_angles))


DEFAULT_BUDGET = AngleBudget()


@dataclass(frozen=True)
class RadialProfile:
    radii: np.ndarray
    values: np.ndarray
    argmax_angles: np.ndarray
    n_angles_used: np.ndarray
    flags: tuple = field(default=())

    def __post_init__(self):
        n = len(self.radii)
        if not (len(self.values) == len(self.argmax_angles) == len(self.n_angles_used) == n):
            raise ValueError("profile lists must share length")

    def __len__(self):
        return len(self.radii)

    @property
    def last(self) -> float:
        return float(self.values[-1])


# ---- counting function ------------------------------------------------------------------


def atomic_lattice_count(t: float, u):
    """Sum of -log|z| over every z with exp(t (z+1)/(z-1)) = u.

    The branches are z_k = (v_k + t)/(v_k - t) with v_k = log u + 2 pi i k;
    the product over k telescopes into
    (cosh(x - t) - cos y) / (cosh(x + t) - cos y) with log u = x + iy.
    """
    u = np.asarray(u, dtype=complex)
    out = np.zeros(u.shape)
    ok = (np.abs(u) > 0) & (np.abs(u) < 1)
    L = np.log(u[ok])
    x, y = L.real, L.imag
    # cosh(x - t) - cos y over cosh(x + t) - cos y, with 1 - cos y = 2 sin^2(y/2) kept exact
    s2 = 2 * np.sin(y / 2) ** 2
    num = np.cosh(x - t) - 1 + s2
    den = np.cosh(x + t) - 1 + s2
    out[ok] = 0.5 * np.log(num / den)
    return out


def _atomic_parts(psi):
    expr = psi.expr
    if isinstance(expr, AtomicInner):
        return None, expr.t
    if isinstance(expr, Scale):
        return ("scale", expr.r), expr.inner.t
    return ("outer", SelfMap(expr.outer, validate=False)), expr.inner.t


def _atomic_branch_count(t, u, rho=BOUNDARY_FLAG):
    # branches with 1 - |z|^2 = 4 t lr / |v - t|^2 above 1 - rho^2
    L = complex(np.log(u))
    lr = -L.real
    if lr <= 0:
        return 0
    R2 = 4 * t * lr / (1 - rho**2) - (L.real - t) ** 2
    if R2 <= 0:
        return 0
    R = math.sqrt(R2)
    lo = math.ceil((-R - L.imag) / (2 * math.pi))
    hi = math.floor((R - L.imag) / (2 * math.pi))
    return max(0, hi - lo + 1)


def _atomic_tail(t, u, rho=BOUNDARY_FLAG):
    lr = -math.log(abs(u))
    K = max(1.0, math.sqrt(4 * t * lr / (1 - rho**2)) / (2 * math.pi))
    return 2 * (2 * t * lr / (2 * math.pi) ** 2) / K


def _atomic_count_batch(psi, ws, tol):
    kind, t = _atomic_parts(psi)
    if kind is None:
        return atomic_lattice_count(t, ws)
    if kind[0] == "scale":
        u = ws / kind[1]
        return np.where(np.abs(u) < 1, atomic_lattice_count(t, np.where(np.abs(u) < 1, u, 0)), 0.0)
    U = solve_preimages_batch(kind[1], ws, tol=tol)
    vals = atomic_lattice_count(t, np.where(np.isnan(U), 0, U))
    return vals.sum(axis=1)


def counting_function(psi, w, tol: float = 1e-10) -> CountingValue:
    """N_psi(w) = sum over preimages of -log|z|, with multiplicity.

    Raises InfiniteValue when z = 0 is a preimage (w = psi(0)). For maps
    built on ``atomic(t)`` the infinite branch sum is evaluated in closed
    form; ``n_preimages`` then counts branches inside |z| < 1 - 1e-12 and
    ``flagged_boundary_mass`` estimates what lies beyond.
    """
    psi = as_selfmap(psi)
    w = complex(w)
    if not abs(w) < 1:
        raise ValueError("w must lie in the open unit disk")
    if w == psi.psi0:
        raise InfiniteValue(f"N is infinite at w = psi(0) = {w}")
    if psi.rational_form is None and _is_atomic_form(psi.expr):
        kind, t = _atomic_parts(psi)
        if kind is None:
            us = [(w, 1)]
        elif kind[0] == "scale":
            u = w / kind[1]
            us = [(u, 1)] if abs(u) < 1 else []
        else:
            us = list(solve_preimages(kind[1], w, tol=tol, certify=False))
        value = sum(m * float(atomic_lattice_count(t, u)) for u, m in us)
        count = sum(m * _atomic_branch_count(t, u) for u, m in us if u != 0)
        tail = sum(m * _atomic_tail(t, u) for u, m in us if u != 0)
        return CountingValue(w, max(value, 0.0), count, tail)
    ps = solve_preimages(psi, w, tol=tol)
    if ps.roots.size and np.any(ps.roots == 0):
        raise InfiniteValue(f"z = 0 is a preimage of {w}")
    terms = -np.log(np.abs(ps.roots)) * ps.multiplicities
    value = math.fsum(terms)
    flagged = math.fsum(terms[np.abs(ps.roots) > BOUNDARY_FLAG])
    return CountingValue(w, value, ps.total, flagged)


def counting_values(psi, ws, tol: float = 1e-10) -> np.ndarray:
    """N_psi at many targets; NaN where w = psi(0)."""
    psi = as_selfmap(psi)
    ws = np.asarray(ws, dtype=complex)
    shape = ws.shape
    ws = ws.ravel()
    hit = ws == psi.psi0
    # any other point stands in for psi(0); its value is discarded
    safe = np.where(hit, psi.psi0 / 2 if psi.psi0 != 0 else 0.5, ws)
    if psi.rational_form is not None:
        Z = solve_preimages_batch(psi, safe, tol=tol)
        with np.errstate(divide="ignore"):
            vals = np.nansum(-np.log(np.abs(Z)), axis=1)
    elif _is_atomic_form(psi.expr):
        vals = _atomic_count_batch(psi, safe, tol)
    else:
        vals = np.array([counting_function(psi, w, tol).value for w in safe])
    vals = np.where(hit, np.nan, np.maximum(vals, 0.0))
    return vals.reshape(shape)


# ---- radial suprema ------------------------------------------------------------------------


def _golden_max(f, lo, hi, steps):
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    best = (fc, c) if fc >= fd else (fd, d)
    for _ in range(steps):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
        best = max(best, (fc, c), (fd, d))
    return best


def sup_profile(batch: Callable, radii, budget: AngleBudget = DEFAULT_BUDGET, scale=None) -> RadialProfile:
    """Per radius, max over an angle grid of batch(r e^{i theta}) * scale(r),
    sharpened by golden-section steps around the grid argmax.

    ``batch`` maps an array of points to values, NaN for excluded points.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise ValueError("radii must be a nonempty list")
    if np.any(~(radii > 0)) or np.any(~(radii < 1)):
        raise ValueError("radii must lie in (0, 1)")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing")
    values, angles, used, flags = [], [], [], []
    for r in radii:
        n = budget.n_angles(r)
        theta = 2 * np.pi * np.arange(n) / n
        fac = 1.0 if scale is None else scale(r)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NoConvergenceWarning)
            vals = np.asarray(batch(r * np.exp(1j * theta)), dtype=float) * fac
            note = []
            if np.any(np.isnan(vals)):
                note.append("psi0_skipped")
            if np.all(np.isnan(vals)):
                values.append(0.0)
                angles.append(0.0)
                used.append(n)
                flags.append(tuple(note))
                continue
            k = int(np.nanargmax(vals))
            best, arg = float(vals[k]), float(theta[k])
            h = 2 * np.pi / n

            def f(t):
                v = float(np.asarray(batch(np.array([r * np.exp(1j * t)])), dtype=float)[0]) * fac
                return -math.inf if math.isnan(v) else v

            lo, hi = arg - h, arg + h
            for _ in range(budget.refine_rounds):
                fv, tv = _golden_max(f, lo, hi, budget.steps_per_round)
                if fv > best:
                    best, arg = fv, tv
                width = (hi - lo) * GOLDEN ** budget.steps_per_round
                lo, hi = arg - width, arg + width
        if any(issubclass(c.category, NoConvergenceWarning) for c in caught):
            note.append("no_convergence")
        values.append(best)
        angles.append(float(np.mod(arg, 2 * np.pi)))
        used.append(n)
        flags.append(tuple(note))
    return RadialProfile(radii, np.array(values), np.array(angles), np.array(used, dtype=int), tuple(flags))


def counting_profile(psi, radii, angle_budget: AngleBudget = DEFAULT_BUDGET, tol: float = 1e-10) -> RadialProfile:
    """max over |w| = r of N_psi(w)/(1 - r) for each radius."""
    psi = as_selfmap(psi)
    return sup_profile(lambda ws: counting_values(psi, ws, tol), radii, angle_budget, scale=lambda r: 1 / (1 - r))


# ---- Moebius maps --------------------------------------------------------------------------


def moebius_apply(a, z):
    """phi_a(z) = (a - z)/(1 - conj(a) z)."""
    a = complex(a)
    if not abs(a) < 1:
        raise ValueError("|a| must be < 1")
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1 + 1e-15):
        raise ValueError("|z| must be <= 1")
    out = (a - z) / (1 - a.conjugate() * z)
    return complex(out) if out.ndim == 0 else out


def compose_with_moebius(a, psi) -> SelfMap:
    """phi_a o psi as a catalog Compose node."""
    a = complex(a)
    if not abs(a) < 1:
        raise ValueError("|a| must be < 1")
    psi = as_selfmap(psi)
    return SelfMap(Compose(Mobius(a), psi.expr), validate=False)


def counting_transform_check(psi, a, w, tol: float = 1e-10) -> dict:
    """N_psi(phi_a(w)) against N_{phi_a o psi}(w)."""
    psi = as_selfmap(psi)
    lhs = counting_function(psi, moebius_apply(a, w), tol).value
    rhs = counting_function(compose_with_moebius(a, psi), w, tol).value
    return {"lhs": lhs, "rhs": rhs, "diff": abs(lhs - rhs)}


def subaveraging_check(psi, a, quad: Optional[QuadConfig] = None, tol: float = 1e-10) -> dict:
    """Area mean of N_{phi_a o psi} against |phi_a(psi(0))|^2 N_psi(a).

    The integrand has a logarithmic singularity at the preimages of
    phi_a(psi(0)); a node landing exactly on psi(0) contributes nothing.
    """
    psi = as_selfmap(psi)
    a = complex(a)
    if a == psi.psi0:
        raise InfiniteValue("a = psi(0)")
    quad = quad or DEFAULT_CONFIG.replace(abs_tol=1e-3, rel_tol=1e-3, max_nodes=2**18)
    chi = compose_with_moebius(a, psi)

    def g(z):
        return np.nan_to_num(counting_values(chi, z, tol), nan=0.0)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergenceWarning)
        integral, info = disk_integral(g, quad, full_output=True)
    bound = abs(moebius_apply(a, psi.psi0)) ** 2 * counting_function(psi, a, tol).value
    slack = max(info.error_estimate, quad.tol(integral))
    return {"integral": integral, "bound": bound, "ok": bool(integral >= bound - slack)}


def littlewood_bound(psi, w) -> float:
    """-log|phi_{psi(0)}(w)|, the upper bound for N_psi(w)."""
    psi = as_selfmap(psi)
    return -math.log(abs(moebius_apply(psi.psi0, w)))
