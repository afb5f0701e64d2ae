"""Validated self-maps and the evaluation services built on them."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import DomainError, NotSelfMap, PrecisionLoss, SingularBoundaryPoint
from .expr import Compose, MapExpr, Poly, Rational, RationalForm, Scale
from .parser import parse_map

logger = logging.getLogger(__name__)

SELF_MAP_TOL = 1e-12
RATIONAL_MATCH_TOL = 1e-12


def _check_interior(z):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("points must be finite")
    if np.any(np.abs(z) >= 1):
        raise ValueError("points must lie in the open unit disk")
    return z


def _interior_probe(n=64, seed=12345):
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0, 0.95**2, n))
    return r * np.exp(2j * np.pi * rng.uniform(size=n))


class SelfMap:
    """An analytic self-map of the disk built from a catalog expression.

    Poly and Rational nodes are checked with :func:`validate_self_map` at
    construction, so every instance is known (by sampling) to map the disk
    into itself. ``rational_form`` holds ascending ``(num, den)`` coefficient
    arrays when the whole expression is rational.
    """

    def __init__(self, expr: MapExpr, spec: Optional[str] = None, validate: bool = True):
        if isinstance(expr, str):
            spec = expr
            expr = parse_map(expr)
        if not isinstance(expr, MapExpr):
            raise TypeError(f"expected MapExpr, got {type(expr).__name__}")
        self.expr = expr
        self.spec = spec if spec is not None else expr.to_spec()
        if validate:
            for node in _iter_nodes(expr):
                if isinstance(node, (Poly, Rational)):
                    validate_self_map(node)
        self.rational_form = self._build_rational()
        self.is_inner = expr.is_inner
        self.psi0 = complex(expr.value(np.zeros(1, dtype=complex))[0])
        self.fixes_zero = abs(self.psi0) < 1e-15

    @classmethod
    def from_spec(cls, spec: str) -> "SelfMap":
        return cls(parse_map(spec), spec=spec)

    def _build_rational(self) -> Optional[RationalForm]:
        rf = self.expr.rational()
        if rf is None:
            return None
        num, den = rf
        z = _interior_probe()
        err = np.max(np.abs(P.polyval(z, num) / P.polyval(z, den) - self.expr.value(z)))
        if not err <= RATIONAL_MATCH_TOL:
            logger.warning("dropping rational form of %s: mismatch %.3g", self.spec, err)
            return None
        return num, den

    @property
    def degree(self) -> Optional[int]:
        if self.rational_form is None:
            return None
        num, den = self.rational_form
        return max(num.size, den.size) - 1

    def __call__(self, z):
        return self.expr.value(z)

    def derivative(self, z):
        return self.expr.deriv(z)

    def boundary(self, theta):
        """Boundary trace psi(e^{i theta}); raises SingularBoundaryPoint at singular nodes."""
        return self.expr.value(np.exp(1j * np.asarray(theta, dtype=float)))

    def __eq__(self, other):
        return isinstance(other, SelfMap) and other.expr == self.expr

    def __hash__(self):
        return hash(self.expr)

    def __repr__(self):
        return f"SelfMap({self.spec!r})"


def _iter_nodes(expr):
    yield expr
    if isinstance(expr, Compose):
        yield from _iter_nodes(expr.outer)
        yield from _iter_nodes(expr.inner)
    elif isinstance(expr, Scale):
        yield from _iter_nodes(expr.inner)


def as_selfmap(obj) -> SelfMap:
    if isinstance(obj, SelfMap):
        return obj
    if isinstance(obj, str):
        return SelfMap.from_spec(obj)
    if isinstance(obj, MapExpr):
        return SelfMap(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a self-map")


def eval_map(psi, z):
    """psi(z) for z in the open disk (scalar or array)."""
    psi = as_selfmap(psi)
    out = psi(_check_interior(z))
    return complex(out) if np.ndim(out) == 0 else out


def map_derivative(psi, z):
    psi = as_selfmap(psi)
    out = psi.derivative(_check_interior(z))
    return complex(out) if np.ndim(out) == 0 else out


def boundary_value(psi, theta):
    psi = as_selfmap(psi)
    th = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(th)):
        raise ValueError("theta must be finite")
    out = psi.boundary(th)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ValidationReport:
    accepted: bool
    max_modulus: float
    witness: complex
    n_samples: int


def validate_self_map(psi, n_samples: int = 256) -> ValidationReport:
    """Sample |psi| on concentric circles up to 1 - 1e-6 and on the circle.

    Raises NotSelfMap with the witness point when the sampled maximum
    exceeds ``1 + 1e-12``.
    """
    if n_samples < 64:
        raise ValueError("n_samples must be >= 64")
    expr = psi.expr if isinstance(psi, SelfMap) else psi
    if isinstance(expr, str):
        expr = parse_map(expr)
    radii = np.concatenate([np.linspace(0, 0.99, 12), 1 - np.logspace(-2, -6, 5), [1.0]])
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    z = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
    try:
        vals = np.abs(expr.value(z))
    except SingularBoundaryPoint:
        theta = theta + np.pi / n_samples
        z = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
        vals = np.abs(expr.value(z))
    vals = np.where(np.isfinite(vals), vals, np.inf)
    k = int(np.argmax(vals))
    report = ValidationReport(
        accepted=bool(vals[k] <= 1 + SELF_MAP_TOL),
        max_modulus=float(vals[k]),
        witness=complex(z[k]),
        n_samples=int(z.size),
    )
    if not report.accepted:
        raise NotSelfMap(
            f"{expr.to_spec()} is not a self-map: |psi({report.witness:.6g})| = {report.max_modulus:.12g}",
            witness=report.witness,
            modulus=report.max_modulus,
        )
    return report


@dataclass(frozen=True)
class TaylorSeries:
    coeffs: np.ndarray
    trunc_error_bound: float
    radii: tuple = field(default=())

    def __post_init__(self):
        if not self.trunc_error_bound >= 0:
            raise ValueError("trunc_error_bound must be >= 0")
        bad = np.abs(self.coeffs) > 1 + 1e-9
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise NotSelfMap(f"Taylor coefficient {k} has modulus {abs(self.coeffs[k]):.6g} > 1")

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]


def _fft_coeffs(psi, n, rho):
    # node count: >= 4(n+1) and rho^M below rounding so aliasing is negligible
    m_alias = math.ceil(math.log(1e-17) / math.log(rho))
    m = 1 << max(int(4 * (n + 1) - 1).bit_length(), int(m_alias - 1).bit_length(), 6)
    z = rho * np.exp(2j * np.pi * np.arange(m) / m)
    vals = psi(z)
    c = np.fft.fft(vals)[: n + 1] / m
    k = np.arange(n + 1)
    sup = float(np.max(np.abs(vals)))
    with np.errstate(over="ignore"):
        scale = rho ** (-k.astype(float))
        coeffs = c * scale
        # aliasing (Cauchy estimate sup * rho^M) plus rounding amplified by rho^-k
        bound = sup * (rho**m / (1 - rho**m) + 4 * np.finfo(float).eps * np.sqrt(m)) * scale
    return coeffs, bound


def taylor_coefficients(psi, n: int, rho: float = 0.7, rho2: Optional[float] = None) -> TaylorSeries:
    """Coefficients of z^0..z^n from FFT samples on |z| = rho.

    A second radius (0.8 by default) repeats the extraction; disagreement
    above 1e-8 raises PrecisionLoss.
    """
    psi = as_selfmap(psi)
    if not (1 <= n <= 2**16):
        raise ValueError("n must lie in [1, 2**16]")
    if not (0 < rho < 1):
        raise ValueError("rho must lie in (0, 1)")
    if rho2 is None:
        rho2 = 0.8 if rho == 0.7 else min(rho + 0.1, (1 + rho) / 2)
    c1, b1 = _fft_coeffs(psi, n, rho)
    c2, b2 = _fft_coeffs(psi, n, rho2)
    diff = np.abs(c1 - c2)
    if not np.all(diff <= 1e-8):
        k = int(np.argmax(~(diff <= 1e-8)))
        raise PrecisionLoss(
            f"Taylor coefficient {k} differs by {diff[k]:.3g} between radii {rho} and {rho2}"
        )
    bound = float(np.max(np.minimum(b1, b2)))
    return TaylorSeries(coeffs=c2 if b2[-1] < b1[-1] else c1, trunc_error_bound=bound, radii=(rho, rho2))


# Built-in maps with the verdicts the theory predicts for them.
CATALOG = (
    ("identity", "NonCompactConsistent", "inner, fixes 0"),
    ("monomial(2)", "NonCompactConsistent", "inner, fixes 0"),
    ("monomial(3)", "NonCompactConsistent", "inner, fixes 0"),
    ("blaschke(0, 0.5)", "NonCompactConsistent", "inner, fixes 0"),
    ("mobius(0.5)", "NonCompactConsistent", "automorphism"),
    ("halfplane", "NonCompactConsistent", "touches the circle at 1; essential norm squared 2"),
    ("compose(monomial(2), mobius(0.3+0.1i))", "NonCompactConsistent", "composition with an automorphism"),
    ("poly(0, 0.5, 0.5)", "NonCompactConsistent", "touches the circle at 1"),
    ("const(0.3)", "CompactConsistent", "constant"),
    ("const(0)", "CompactConsistent", "constant"),
    ("scale(0.5, identity)", "CompactConsistent", "image in |w| <= 1/2"),
    ("scale(0.5, monomial(2))", "CompactConsistent", "image in |w| <= 1/2"),
    ("atomic(1)", "NonCompactConsistent", "singular inner; counting side best-effort"),
)

RATIONAL_CATALOG = tuple(spec for spec, _, _ in CATALOG if not spec.startswith("atomic"))
