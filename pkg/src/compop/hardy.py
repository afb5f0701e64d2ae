"""H^2-side quantities: power norms, the Poisson-type transform, and exact identity checks."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import NoConvergenceWarning, SingularBoundaryPoint, TruncationTooLoose
from .mapspec import SelfMap, as_selfmap
from .nevanlinna import counting_values
from .quad import DEFAULT_CONFIG, QuadConfig, QuadInfo, circle_integral, disk_integral

FINITE = "finite"
DIVERGENT = "divergent"
UNKNOWN = "unknown"

# sampled sup |psi| at or above this counts as touching the circle
TOUCH_TOL = 1e-9


class BoundarySamples:
    """Nested boundary grids psi(e^{i(delta + 2 pi j / n)}), n = 2^k.

    ``delta`` is 0 unless a node hits a singular boundary point, in which
    case the whole family is rotated by an offset below the finest spacing.
    """

    def __init__(self, psi, n0: int = 256):
        self.psi = as_selfmap(psi)
        self.n0 = n0
        try:
            self.delta = 0.0
            base = self._eval(2 * np.pi * np.arange(n0) / n0)
        except SingularBoundaryPoint:
            # a fraction of the finest spacing that no dyadic refinement reaches
            self.delta = 2 * np.pi * 0.3819660112501051 / 2**21
            base = self._eval(2 * np.pi * np.arange(n0) / n0)
        self._levels = {n0: base}

    def _eval(self, theta):
        return np.asarray(self.psi.boundary(theta + self.delta), dtype=complex)

    def get(self, n: int) -> np.ndarray:
        if n in self._levels:
            return self._levels[n]
        if n < self.n0 or n % self.n0 or (n // self.n0) & (n // self.n0 - 1):
            raise ValueError("n must be n0 times a power of two")
        prev = self.get(n // 2)
        odd = self._eval(2 * np.pi * (np.arange(n // 2) + 0.5) / (n // 2))
        out = np.empty(n, dtype=complex)
        out[0::2] = prev
        out[1::2] = odd
        out.flags.writeable = False
        self._levels[n] = out
        return out

    def sup_modulus(self, n: int = 4096) -> float:
        return float(np.max(np.abs(self.get(max(n, self.n0)))))


@dataclass(frozen=True)
class PowerNormTable:
    map_spec: str
    norms_sq: np.ndarray
    tail_bound: Optional[float]
    status: str
    sup_modulus: float

    @property
    def total(self) -> float:
        """sum of ||psi^n||^2 over all n when the tail is finite, else inf."""
        if self.status != FINITE:
            return math.inf
        return math.fsum(self.norms_sq) + self.tail_bound


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    config: QuadConfig

    @classmethod
    def of(cls, lhs, rhs, config):
        err = abs(lhs - rhs)
        return cls(lhs, rhs, err, err / max(abs(lhs), abs(rhs), 1e-300), config)


def h2_power_norm(psi, n: int, config: QuadConfig = DEFAULT_CONFIG) -> float:
    """||psi^n||^2 in H^2, the boundary mean of |psi|^(2n)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1.0
    psi = as_selfmap(psi)
    val = circle_integral(lambda t: np.abs(psi.boundary(t)) ** (2 * n), config)
    return min(max(val, 0.0), 1.0)


def power_sum_tail(psi, N: int, config: QuadConfig = DEFAULT_CONFIG) -> PowerNormTable:
    """Norms ||psi^n||^2 for n < N and a bound on the sum over n >= N.

    With s = sup |psi| on the circle (sampled) the tail is at most
    s^(2N)/(1 - s^2). When s reaches 1 the tail diverges for inner maps and
    is left unknown otherwise.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    psi = as_selfmap(psi)
    norms = np.array([h2_power_norm(psi, n, config) for n in range(N)])
    s = BoundarySamples(psi).sup_modulus(1 << 14)
    if s < 1 - TOUCH_TOL:
        tail, status = s ** (2 * N) / (1 - s * s), FINITE
    else:
        tail, status = None, DIVERGENT if psi.is_inner else UNKNOWN
    return PowerNormTable(psi.spec, norms, tail, status, s)


# ---- the Poisson-type transform --------------------------------------------------------------


def _kernel_sums(vals, a):
    """Row sums of (1 - |a|^2)/|1 - conj(a) psi_j|^2 over the sample vector.

    |1 - conj(a) psi|^2 is expanded in real arithmetic; near |a| = 1 this
    loses about eps/(1 - |a|)^2 relative accuracy, far below profile tolerances.
    """
    a = np.asarray(a, dtype=complex)
    a2 = a.real**2 + a.imag**2
    left = np.stack([np.ones_like(a2), a2, -2 * a.real, -2 * a.imag], axis=1)
    right = np.stack([np.ones(vals.size), vals.real**2 + vals.imag**2, vals.real, vals.imag])
    den = left @ right
    np.reciprocal(den, out=den)
    return (1 - a2) * np.add.reduce(den, axis=1)


def poisson_transform(psi, a, config: QuadConfig = DEFAULT_CONFIG, full_output: bool = False):
    """(1 - |a|^2) times the boundary mean of 1/|1 - conj(a) psi|^2."""
    psi = as_selfmap(psi)
    a = complex(a)
    if not abs(a) < 1:
        raise ValueError("|a| must be < 1")
    s = 1 - abs(a) ** 2
    ac = a.conjugate()

    def f(t):
        return s / np.abs(1 - ac * psi.boundary(t)) ** 2

    return circle_integral(f, config, full_output=full_output)


def inner_transform(c, a) -> float:
    """Exact transform of an inner map with psi(0) = c: (1 - |a c|^2)/|1 - conj(a) c|^2."""
    c, a = complex(c), complex(a)
    return (1 - abs(a * c) ** 2) / abs(1 - a.conjugate() * c) ** 2


def poisson_transform_batch(psi, a_values, config: QuadConfig = DEFAULT_CONFIG, samples: Optional[BoundarySamples] = None,
                            chunk: int = 1 << 22, prune: bool = False):
    """poisson_transform at many points, sharing one nested boundary grid.

    Returns (values, converged). Each point doubles its own node count
    until successive trapezoid estimates agree to tolerance. The first
    grid already resolves the kernel width 1 - |a|.

    With ``prune=True`` only the maximum matters: once the grid is four
    times finer than the kernel width, a point whose estimate plus ten
    times its doubling error cannot beat the best lower estimate by more
    than the tolerance is dropped and reported as -inf. Maps with a
    singular boundary point are never pruned: their error estimates are
    unreliable near that point.
    """
    psi = as_selfmap(psi)
    av = np.asarray(a_values, dtype=complex).ravel()
    mods = np.abs(av)
    if np.any(~(mods < 1)):
        raise ValueError("|a| must be < 1")
    samples = samples or BoundarySamples(psi)
    values = np.full(av.size, np.nan)
    done = np.zeros(av.size, dtype=bool)
    width = 1 - (mods.max() if av.size else 0.0)
    n = samples.n0
    while n < 1 / width and 2 * n <= config.max_nodes // 2:
        n *= 2
    prev = None
    pending = np.arange(av.size)
    best_lower = -math.inf
    while pending.size:
        vals = samples.get(n)
        rows = max(1, chunk // n)
        est = np.empty(pending.size)
        for s in range(0, pending.size, rows):
            sl = slice(s, s + rows)
            est[sl] = _kernel_sums(vals, av[pending[sl]]) / n
        if prev is not None:
            err = np.abs(est - prev)
            tol = np.maximum(config.abs_tol, config.rel_tol * np.abs(est))
            ok = err < tol
            values[pending[ok]] = est[ok]
            done[pending[ok]] = True
            keep = ~ok
            if prune and n * width >= 4 and samples.delta == 0:
                lower = np.where(ok, est, est - 10 * err)
                best_lower = max(best_lower, float(lower.max()))
                beaten = est + 10 * err < best_lower + tol
                values[pending[keep & beaten]] = -math.inf
                done[pending[keep & beaten]] = True
                keep &= ~beaten
            pending, prev = pending[keep], est[keep]
        else:
            prev = est
        if 2 * n > config.max_nodes:
            values[pending] = prev
            break
        n *= 2
    if not np.all(done):
        warnings.warn(f"poisson_transform_batch: {int((~done).sum())} points did not converge", NoConvergenceWarning,
                      stacklevel=2)
    return values, done


class SeriesValue(NamedTuple):
    value: float
    truncation_bound: float
    n_terms: int
    n_nodes: int


def poisson_transform_series(psi, a, N: int, config: QuadConfig = DEFAULT_CONFIG,
                             samples: Optional[BoundarySamples] = None) -> SeriesValue:
    """Transform from the first N terms of 1/(1 - conj(a) psi) = sum conj(a)^n psi^n.

    (1 - |a|^2) sum_{m,n<N} a^m conj(a)^n <psi^n, psi^m> is the boundary mean
    of |S_N|^2 with S_N the partial sum, so it is evaluated as such on shared
    samples. With R the remainder, ||R|| <= (|a| s)^N / (1 - |a| s) where s
    is the sampled sup of |psi|, and the omitted part is at most
    (1 - |a|^2)(2 ||S_N|| ||R|| + ||R||^2).
    """
    psi = as_selfmap(psi)
    a = complex(a)
    if not abs(a) < 1:
        raise ValueError("|a| must be < 1")
    if N < 1:
        raise ValueError("N must be >= 1")
    samples = samples or BoundarySamples(psi)
    ac = a.conjugate()
    w = 1 - abs(a) ** 2

    def partial_mean(n):
        v = samples.get(n)
        S = np.zeros_like(v)
        for _ in range(N):
            S = S * (ac * v) + 1
        return float(np.add.reduce(np.abs(S) ** 2)) / n

    n = samples.n0
    while n < 4 * N:
        n *= 2
    est = partial_mean(n)
    while True:
        if 2 * n > config.max_nodes:
            warnings.warn("poisson_transform_series: sample count cap reached", NoConvergenceWarning, stacklevel=2)
            break
        new = partial_mean(2 * n)
        n *= 2
        err, est = abs(new - est), new
        if err < config.tol(est):
            break
    s = min(samples.sup_modulus(n), 1.0)
    q = abs(a) * s
    rnorm = q**N / (1 - q)
    bound = w * (2 * math.sqrt(est) * rnorm + rnorm**2)
    value = w * est
    if bound > config.rel_tol * value:
        raise TruncationTooLoose(
            f"truncation bound {bound:.3g} exceeds {config.rel_tol:g} x value {value:.6g}; raise N",
            bound=bound,
            value=value,
        )
    return SeriesValue(value, bound, N, n)


def poisson_transform_series_auto(psi, a, config: QuadConfig = DEFAULT_CONFIG, N0: int = 8,
                                  N_max: int = 4096) -> SeriesValue:
    """poisson_transform_series with N doubled until the truncation bound passes."""
    psi = as_selfmap(psi)
    samples = BoundarySamples(psi)
    N = N0
    while True:
        try:
            return poisson_transform_series(psi, a, N, config, samples)
        except TruncationTooLoose:
            if 2 * N > N_max:
                raise
            N *= 2


# ---- exact identities ---------------------------------------------------------------------


def _lp_density(psi, a):
    ac = complex(a).conjugate()

    def g(z):
        with np.errstate(divide="ignore"):
            lg = np.where(z == 0, 0.0, -np.log(np.abs(z)))
        return np.abs(ac * psi.derivative(z) / (1 - ac * psi(z)) ** 2) ** 2 * lg

    return g


def littlewood_paley_check(psi, a, config: QuadConfig = DEFAULT_CONFIG) -> IdentityCheck:
    """Littlewood-Paley for f = 1/(1 - conj(a) psi), scaled by 1 - |a|^2.

    lhs is the boundary transform; rhs is (1 - |a|^2)(c(a) + 2 A) with
    c(a) = 1/|1 - conj(a) psi(0)|^2 and A the log-weighted area integral
    of |f'|^2.
    """
    psi = as_selfmap(psi)
    a = complex(a)
    if not abs(a) < 1:
        raise ValueError("|a| must be < 1")
    lhs = poisson_transform(psi, a, config)
    c = 1 / abs(1 - a.conjugate() * psi.psi0) ** 2
    area = disk_integral(_lp_density(psi, a), config)
    rhs = (1 - abs(a) ** 2) * (c + 2 * area)
    return IdentityCheck.of(lhs, rhs, config)


def change_of_variables_check(psi, a, config: Optional[QuadConfig] = None, tol: float = 1e-10) -> IdentityCheck:
    """Area integral over z against the counting-weighted integral over w.

    lhs = 2 int |conj(a) psi'/(1 - conj(a) psi)^2|^2 log(1/|z|) dA(z),
    rhs = 2 int N_psi(w) |a|^2 / |1 - conj(a) w|^4 dA(w). A node landing on
    psi(0), where N is infinite, is dropped.
    """
    psi = as_selfmap(psi)
    a = complex(a)
    if not 0 < abs(a) < 1:
        raise ValueError("need 0 < |a| < 1")
    config = config or DEFAULT_CONFIG.replace(abs_tol=1e-6, rel_tol=1e-6)
    ac = a.conjugate()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergenceWarning)
        lhs = 2 * disk_integral(_lp_density(psi, a), config)

        def g(w):
            N = np.nan_to_num(counting_values(psi, w, tol), nan=0.0)
            return N * abs(a) ** 2 / np.abs(1 - ac * w) ** 4

        rhs = 2 * disk_integral(g, config)
    return IdentityCheck.of(lhs, rhs, config)


def power_series_chain(psi, a_values, N: int, config: QuadConfig = DEFAULT_CONFIG) -> dict:
    """Both sides of sqrt(I(a)) <= sqrt(1-|a|^2) sum_{n<N} |a|^n ||psi^n|| + sqrt(tail_N).

    ``eps`` is sqrt(tail_N); near |a| = 1 the first term vanishes and the
    left side must fall below 2 eps.
    """
    psi = as_selfmap(psi)
    table = power_sum_tail(psi, N, config)
    if table.status != FINITE:
        raise ValueError(f"{psi.spec}: power sum tail is {table.status}")
    eps = math.sqrt(table.tail_bound)
    a_values = np.asarray(a_values, dtype=complex)
    norms = np.sqrt(table.norms_sq)
    lhs, rhs = [], []
    for a in a_values:
        r = abs(a)
        lhs.append(math.sqrt(poisson_transform(psi, a, config)))
        rhs.append(math.sqrt(1 - r * r) * float(np.dot(r ** np.arange(N), norms)) + eps)
    lhs, rhs = np.array(lhs), np.array(rhs)
    return {"a": a_values, "lhs": lhs, "rhs": rhs, "eps": eps, "holds": bool(np.all(lhs <= rhs + 1e-12))}
