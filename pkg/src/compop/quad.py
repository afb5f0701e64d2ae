"""Quadrature on the circle and the disk with normalised measures.

Both ``dm`` on the circle and ``dA`` on the disk have total mass one, so
``circle_integral(lambda t: 1 + 0 * t)`` and ``disk_integral(lambda z: 1 + 0 * z.real)``
return 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .errors import NoConvergenceWarning, SingularBoundaryPoint

DOUBLING = "doubling"
ADAPTIVE = "adaptive"
MAX_NODES_CAP = 2**20


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    max_nodes: int = MAX_NODES_CAP
    refinement: str = DOUBLING

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (64 <= self.max_nodes <= MAX_NODES_CAP):
            raise ValueError(f"max_nodes must lie in [64, {MAX_NODES_CAP}]")
        if self.refinement not in (DOUBLING, ADAPTIVE):
            raise ValueError(f"refinement must be {DOUBLING!r} or {ADAPTIVE!r}")

    def tol(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def replace(self, **kw) -> "QuadConfig":
        d = dict(self.__dict__)
        d.update(kw)
        return QuadConfig(**d)


DEFAULT_CONFIG = QuadConfig()


class QuadInfo(NamedTuple):
    error_estimate: float
    n_nodes: int
    converged: bool


def _finish(value, info, full_output, what):
    if not info.converged:
        warnings.warn(
            f"{what}: no convergence with {info.n_nodes} nodes (error estimate {info.error_estimate:.3g})",
            NoConvergenceWarning,
            stacklevel=3,
        )
    return (value, info) if full_output else value


def _pairwise_mean(v):
    # numpy's add.reduce is pairwise for contiguous float arrays
    return float(np.add.reduce(np.ascontiguousarray(v, dtype=float)) / v.size)


@lru_cache(maxsize=32)
def gauss_legendre01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _trapezoid_doubling(f, config, n0=256):
    shift = 0.0
    n = n0
    try:
        vals = np.asarray(f(2 * np.pi * np.arange(n) / n), dtype=float)
    except SingularBoundaryPoint:
        shift = 0.5
        vals = np.asarray(f(2 * np.pi * (np.arange(n) + shift) / n), dtype=float)
    total = float(np.add.reduce(vals))
    est = total / n
    while 2 * n <= config.max_nodes:
        if shift == 0.0:
            odd = np.asarray(f(2 * np.pi * (np.arange(n) + 0.5) / n), dtype=float)
            total += float(np.add.reduce(odd))
            n *= 2
            new = total / n
        else:
            # half-step offset grids are not nested; recompute
            n *= 2
            new = _pairwise_mean(np.asarray(f(2 * np.pi * (np.arange(n) + shift) / n), dtype=float))
        err = abs(new - est)
        est = new
        if err < config.tol(est):
            return est, QuadInfo(err, n, True)
    return est, QuadInfo(err if n > n0 else math.inf, n, False)


def _adaptive_panels(f, a, b, config, order=20):
    """Global adaptive Gauss-Legendre with panel bisection on [a, b]."""
    x, w = gauss_legendre01(order)

    def panel(lo, hi):
        h = hi - lo
        return h * float(np.dot(w, f(lo + h * x)))

    def refined(lo, hi):
        mid = (lo + hi) / 2
        return panel(lo, mid), panel(mid, hi)

    panels = []
    whole = panel(a, b)
    left, right = refined(a, b)
    panels.append((abs(left + right - whole), a, b, left + right))
    n_nodes = 3 * order
    while True:
        total = math.fsum(p[3] for p in panels)
        err = math.fsum(p[0] for p in panels)
        if err < config.tol(total):
            return total, QuadInfo(err, n_nodes, True)
        if n_nodes + 4 * order > config.max_nodes:
            return total, QuadInfo(err, n_nodes, False)
        # split the worst panel
        k = max(range(len(panels)), key=lambda i: panels[i][0])
        _, lo, hi, _ = panels.pop(k)
        mid = (lo + hi) / 2
        for s, e in ((lo, mid), (mid, hi)):
            whole = panel(s, e)
            l2, r2 = refined(s, e)
            panels.append((abs(l2 + r2 - whole), s, e, l2 + r2))
        n_nodes += 6 * order


def circle_integral(f: Callable, config: QuadConfig = DEFAULT_CONFIG, full_output: bool = False):
    """Integral of f(theta) against normalised arc length dm = d(theta) / 2 pi.

    Periodic trapezoid with node doubling; if that reaches ``max_nodes``
    (or ``config.refinement == "adaptive"``) falls back to adaptive panel
    bisection. Non-convergence warns with NoConvergenceWarning and returns
    the last estimate.
    """
    trap = None
    if config.refinement == DOUBLING:
        trap = _trapezoid_doubling(f, config)
        if trap[1].converged:
            return _finish(trap[0], trap[1], full_output, "circle_integral")

    def g(t):
        try:
            return np.asarray(f(t), dtype=float)
        except SingularBoundaryPoint:
            return np.asarray(f(t + 1e-12), dtype=float)

    value, info2 = _adaptive_panels(g, 0.0, 2 * np.pi, config.replace(abs_tol=config.abs_tol * 2 * np.pi))
    value /= 2 * np.pi
    info2 = QuadInfo(info2.error_estimate / (2 * np.pi), info2.n_nodes, info2.converged)
    if trap is not None and not info2.converged and trap[1].error_estimate < info2.error_estimate:
        return _finish(trap[0], trap[1], full_output, "circle_integral")
    return _finish(value, info2, full_output, "circle_integral")


def disk_nodes(n_r: int, n_theta: int):
    """Tensor nodes and weights for normalised area measure.

    Radial Gauss-Legendre in s with r = s**2 clusters nodes near the origin,
    where Littlewood-Paley integrands carry log(1/|z|).
    """
    s, ws = gauss_legendre01(n_r)
    r = s**2
    wr = 4 * s**3 * ws
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    z = r[:, None] * np.exp(1j * theta)[None, :]
    w = np.broadcast_to(wr[:, None] / n_theta, z.shape)
    return z, w


def disk_integral(g: Callable, config: QuadConfig = DEFAULT_CONFIG, full_output: bool = False,
                  n_r: int = 32, n_theta: int = 256):
    """Integral of g(z) against normalised area measure dA on the unit disk.

    Radial and angular resolutions are doubled independently, each only
    while its own refinement still moves the estimate by more than tol/2.
    """
    cache = {}

    def rule(nr, nt):
        if (nr, nt) not in cache:
            z, w = disk_nodes(nr, nt)
            vals = np.asarray(g(z), dtype=float)
            cache[(nr, nt)] = float(np.add.reduce((vals * w).ravel()))
        return cache[(nr, nt)]

    while True:
        est = rule(n_r, n_theta)
        if 2 * n_r * n_theta > config.max_nodes:
            return _finish(est, QuadInfo(math.inf, n_r * n_theta, False), full_output, "disk_integral")
        d_theta = abs(rule(n_r, 2 * n_theta) - est)
        d_r = abs(rule(2 * n_r, n_theta) - est) if 2 * n_r * n_theta <= config.max_nodes else math.inf
        tol = config.tol(est)
        if d_theta < tol / 2 and d_r < tol / 2:
            # both refinements agree: combine them to drop the leading error of each
            value = rule(n_r, 2 * n_theta) + rule(2 * n_r, n_theta) - est
            return _finish(value, QuadInfo(d_theta + d_r, 3 * n_r * n_theta, True), full_output,
                           "disk_integral")
        grow_t = d_theta >= tol / 2
        grow_r = d_r >= tol / 2
        if grow_t and grow_r and 4 * n_r * n_theta > config.max_nodes:
            grow_t = d_theta >= d_r
            grow_r = not grow_t
        if grow_t:
            n_theta *= 2
        if grow_r:
            n_r *= 2
        if n_r * n_theta > config.max_nodes:
            return _finish(rule(n_r if not grow_r else n_r // 2, n_theta if not grow_t else n_theta // 2),
                           QuadInfo(max(d_theta, d_r), n_r * n_theta, False), full_output, "disk_integral")


class EnergySeriesValue(NamedTuple):
    closed_form: float
    partial_sum: float
    n_terms: int


def energy_series_closed_form(c: float) -> float:
    """(1 - c^2) * sum_{n>=1} c^(2n-2)/(n+1) in closed form."""
    x = c * c
    if x < 1e-3:
        # series for (-log(1-x) - x)/x^2 = sum x^k/(k+2)
        s = math.fsum(x**k / (k + 2) for k in range(12))
    else:
        s = (-math.log1p(-x) - x) / (x * x)
    return (1 - x) * s


def energy_series_value(c: float) -> EnergySeriesValue:
    if not (0 <= c < 1):
        raise ValueError("c must lie in [0, 1)")
    x = c * c
    terms = []
    n = 1
    while True:
        t = x ** (n - 1) / (n + 1)
        if t < 1e-16:
            break
        terms.append(t)
        n += 1
        if x == 0:
            break
    partial = (1 - x) * math.fsum(terms)
    return EnergySeriesValue(energy_series_closed_form(c), partial, len(terms))


class EnergyValue(NamedTuple):
    quadrature: float
    closed_form: float


def moebius_energy(a: complex, config: QuadConfig = DEFAULT_CONFIG) -> EnergyValue:
    """Both sides of int (1-|w|^2) |phi_a'(w)|^2 dA = (1-|a|^2)(1 - (1-|a|^2) S(|a|))."""
    a = complex(a)
    if not abs(a) < 1:
        raise ValueError("|a| must be < 1")
    s = 1 - abs(a) ** 2
    ac = a.conjugate()

    def integrand(w):
        return (1 - np.abs(w) ** 2) * s**2 / np.abs(1 - ac * w) ** 4

    quad = disk_integral(integrand, config)
    closed = s * (1 - energy_series_closed_form(abs(a)))
    return EnergyValue(quad, closed)
