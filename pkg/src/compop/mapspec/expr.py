"""Expression tree for catalog self-maps of the unit disk.

Every node is an immutable dataclass that evaluates vectorised over numpy
arrays of complex points. ``value`` and ``deriv`` are exact recursive
formulas; ``rational`` returns ascending coefficient arrays ``(num, den)``
when the node is a rational function, else ``None``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import DomainError, SingularBoundaryPoint

MAX_DEPTH = 32
# compositions beyond this degree drop their rational form
MAX_RATIONAL_DEGREE = 64

RationalForm = Tuple[np.ndarray, np.ndarray]


def _finite_complex(x, what):
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{what} must be finite, got {x!r}")
    return z


def format_real(x: float) -> str:
    s = repr(float(x))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def format_complex(z: complex) -> str:
    re, im = z.real, z.imag
    if im == 0:
        return format_real(re)
    if re == 0:
        return f"{format_real(im)}i"
    sign = "-" if im < 0 else "+"
    return f"{format_real(re)}{sign}{format_real(abs(im))}i"


def _trim(c):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


class MapExpr:
    """Base class for map expression nodes."""

    name = ""

    def value(self, z):
        raise NotImplementedError

    def deriv(self, z):
        raise NotImplementedError

    def rational(self) -> Optional[RationalForm]:
        return None

    @property
    def is_inner(self) -> bool:
        return False

    @property
    def depth(self) -> int:
        return 1

    def to_spec(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_spec()

    def __call__(self, z):
        return self.value(z)


@dataclass(frozen=True)
class Identity(MapExpr):
    name = "identity"

    def value(self, z):
        return np.asarray(z, dtype=complex)

    def deriv(self, z):
        return np.ones_like(np.asarray(z, dtype=complex))

    def rational(self):
        return np.array([0, 1], dtype=complex), np.array([1], dtype=complex)

    @property
    def is_inner(self):
        return True

    def to_spec(self):
        return "identity"


@dataclass(frozen=True)
class HalfPlane(MapExpr):
    """psi(z) = (1 + z) / 2."""

    name = "halfplane"

    def value(self, z):
        return (1 + np.asarray(z, dtype=complex)) / 2

    def deriv(self, z):
        return np.full_like(np.asarray(z, dtype=complex), 0.5)

    def rational(self):
        return np.array([0.5, 0.5], dtype=complex), np.array([1], dtype=complex)

    def to_spec(self):
        return "halfplane"


@dataclass(frozen=True)
class Const(MapExpr):
    c: complex
    name = "const"

    def __post_init__(self):
        c = _finite_complex(self.c, "const value")
        if abs(c) >= 1:
            raise DomainError(f"const value must have modulus < 1, got {c}")
        object.__setattr__(self, "c", c)

    def value(self, z):
        return np.full_like(np.asarray(z, dtype=complex), self.c)

    def deriv(self, z):
        return np.zeros_like(np.asarray(z, dtype=complex))

    def rational(self):
        return np.array([self.c], dtype=complex), np.array([1], dtype=complex)

    def to_spec(self):
        return f"const({format_complex(self.c)})"


@dataclass(frozen=True)
class Monomial(MapExpr):
    k: int
    name = "monomial"

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise DomainError(f"monomial exponent must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    def value(self, z):
        return np.asarray(z, dtype=complex) ** self.k

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        if self.k == 1:
            return np.ones_like(z)
        return self.k * z ** (self.k - 1)

    def rational(self):
        num = np.zeros(self.k + 1, dtype=complex)
        num[-1] = 1
        return num, np.array([1], dtype=complex)

    @property
    def is_inner(self):
        return True

    def to_spec(self):
        return f"monomial({self.k})"


@dataclass(frozen=True)
class Mobius(MapExpr):
    """The involutive automorphism (a - z) / (1 - conj(a) z)."""

    a: complex
    name = "mobius"

    def __post_init__(self):
        a = _finite_complex(self.a, "mobius parameter")
        if abs(a) >= 1:
            raise DomainError(f"mobius parameter must have modulus < 1, got {a}")
        object.__setattr__(self, "a", a)

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a - z) / (1 - np.conj(self.a) * z)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return -(1 - abs(self.a) ** 2) / (1 - np.conj(self.a) * z) ** 2

    def rational(self):
        a = self.a
        return np.array([a, -1], dtype=complex), np.array([1, -np.conj(a)], dtype=complex)

    def to_spec(self):
        return f"mobius({format_complex(self.a)})"


def _blaschke_factor(b, z):
    if b == 0:
        return z, np.ones_like(z)
    u = abs(b) / b
    den = 1 - np.conj(b) * z
    return u * (b - z) / den, -u * (1 - abs(b) ** 2) / den**2


@dataclass(frozen=True)
class Blaschke(MapExpr):
    """Finite Blaschke product, factor z at 0 and (|b|/b)(b - z)/(1 - conj(b) z) otherwise."""

    zeros: Tuple[complex, ...]
    name = "blaschke"

    def __post_init__(self):
        zs = tuple(_finite_complex(b, "blaschke zero") for b in self.zeros)
        if not zs:
            raise DomainError("blaschke needs at least one zero")
        for b in zs:
            if abs(b) >= 1:
                raise DomainError(f"blaschke zero {b} lies outside the open disk")
        object.__setattr__(self, "zeros", zs)

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for b in self.zeros:
            out = out * _blaschke_factor(b, z)[0]
        return out

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        vals, ders = zip(*(_blaschke_factor(b, z) for b in self.zeros))
        total = np.zeros_like(z)
        for j in range(len(vals)):
            term = ders[j]
            for k, v in enumerate(vals):
                if k != j:
                    term = term * v
            total = total + term
        return total

    def rational(self):
        num = np.array([1], dtype=complex)
        den = np.array([1], dtype=complex)
        for b in self.zeros:
            if b == 0:
                num = P.polymul(num, [0, 1])
            else:
                u = abs(b) / b
                num = P.polymul(num, [u * b, -u])
                den = P.polymul(den, [1, -np.conj(b)])
        return num, den

    @property
    def is_inner(self):
        return True

    def to_spec(self):
        return "blaschke(" + ", ".join(format_complex(b) for b in self.zeros) + ")"


@dataclass(frozen=True)
class Poly(MapExpr):
    """Polynomial with ascending coefficients c0 + c1 z + ..."""

    coeffs: Tuple[complex, ...]
    name = "poly"

    def __post_init__(self):
        cs = tuple(_finite_complex(c, "poly coefficient") for c in self.coeffs)
        if not cs:
            raise DomainError("poly needs at least one coefficient")
        object.__setattr__(self, "coeffs", cs)

    def value(self, z):
        return P.polyval(np.asarray(z, dtype=complex), np.array(self.coeffs))

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        if len(self.coeffs) == 1:
            return np.zeros_like(z)
        return P.polyval(z, P.polyder(np.array(self.coeffs)))

    def rational(self):
        return _trim(self.coeffs), np.array([1], dtype=complex)

    def to_spec(self):
        return "poly(" + ", ".join(format_complex(c) for c in self.coeffs) + ")"


@dataclass(frozen=True)
class Rational(MapExpr):
    num: Tuple[complex, ...]
    den: Tuple[complex, ...]
    name = "rational"

    def __post_init__(self):
        num = tuple(_finite_complex(c, "rational coefficient") for c in self.num)
        den = tuple(_finite_complex(c, "rational coefficient") for c in self.den)
        if not num or not den:
            raise DomainError("rational needs numerator and denominator coefficients")
        d = _trim(den)
        if not np.any(d):
            raise DomainError("rational denominator is identically zero")
        if d.size > 1:
            poles = P.polyroots(d)
            if np.any(np.abs(poles) <= 1 + 1e-12):
                raise DomainError("rational denominator vanishes in the closed disk")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        return P.polyval(z, np.array(self.num)) / P.polyval(z, np.array(self.den))

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        n, d = np.array(self.num), np.array(self.den)
        dn = P.polyder(n) if n.size > 1 else np.zeros(1, dtype=complex)
        dd = P.polyder(d) if d.size > 1 else np.zeros(1, dtype=complex)
        nv, dv = P.polyval(z, n), P.polyval(z, d)
        return (P.polyval(z, dn) * dv - nv * P.polyval(z, dd)) / dv**2

    def rational(self):
        return _trim(self.num), _trim(self.den)

    def to_spec(self):
        num = ", ".join(format_complex(c) for c in self.num)
        den = ", ".join(format_complex(c) for c in self.den)
        return f"rational({num}; {den})"


@dataclass(frozen=True)
class AtomicInner(MapExpr):
    """exp(t (z + 1) / (z - 1)), singular at z = 1."""

    t: float
    name = "atomic"

    def __post_init__(self):
        t = _finite_complex(self.t, "atomic parameter")
        if t.imag != 0 or t.real <= 0:
            raise DomainError(f"atomic parameter must be a real > 0, got {self.t!r}")
        object.__setattr__(self, "t", t.real)

    def _check(self, z):
        if np.any(np.abs(z - 1) < 1e-14):
            raise SingularBoundaryPoint("atomic inner function is singular at z = 1")

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        self._check(z)
        return np.exp(self.t * (z + 1) / (z - 1))

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        self._check(z)
        return np.exp(self.t * (z + 1) / (z - 1)) * (-2 * self.t) / (z - 1) ** 2

    @property
    def is_inner(self):
        return True

    def to_spec(self):
        return f"atomic({format_real(self.t)})"


@dataclass(frozen=True)
class Scale(MapExpr):
    r: float
    inner: MapExpr
    name = "scale"

    def __post_init__(self):
        r = _finite_complex(self.r, "scale factor")
        if r.imag != 0 or not (0 < r.real <= 1):
            raise DomainError(f"scale factor must lie in (0, 1], got {self.r!r}")
        object.__setattr__(self, "r", r.real)
        if self.depth > MAX_DEPTH:
            raise DomainError(f"expression depth exceeds {MAX_DEPTH}")

    def value(self, z):
        return self.r * self.inner.value(z)

    def deriv(self, z):
        return self.r * self.inner.deriv(z)

    def rational(self):
        rf = self.inner.rational()
        if rf is None:
            return None
        return self.r * rf[0], rf[1]

    @property
    def depth(self):
        return 1 + self.inner.depth

    def to_spec(self):
        return f"scale({format_real(self.r)}, {self.inner.to_spec()})"


def compose_rational(outer: RationalForm, inner: RationalForm) -> RationalForm:
    """Coefficients of outer(inner(z)) after clearing the inner denominator."""
    p, q = outer
    a, b = inner
    n = max(p.size, q.size) - 1
    apow = [np.array([1], dtype=complex)]
    bpow = [np.array([1], dtype=complex)]
    for _ in range(n):
        apow.append(P.polymul(apow[-1], a))
        bpow.append(P.polymul(bpow[-1], b))
    num = np.zeros(1, dtype=complex)
    den = np.zeros(1, dtype=complex)
    for k in range(n + 1):
        basis = P.polymul(apow[k], bpow[n - k])
        if k < p.size and p[k] != 0:
            num = P.polyadd(num, p[k] * basis)
        if k < q.size and q[k] != 0:
            den = P.polyadd(den, q[k] * basis)
    return _trim(num), _trim(den)


@dataclass(frozen=True)
class Compose(MapExpr):
    """outer(inner(z))."""

    outer: MapExpr
    inner: MapExpr
    name = "compose"

    def __post_init__(self):
        if self.depth > MAX_DEPTH:
            raise DomainError(f"expression depth exceeds {MAX_DEPTH}")

    def value(self, z):
        return self.outer.value(self.inner.value(z))

    def deriv(self, z):
        return self.outer.deriv(self.inner.value(z)) * self.inner.deriv(z)

    def rational(self):
        fo = self.outer.rational()
        if fo is None:
            return None
        fi = self.inner.rational()
        if fi is None:
            return None
        deg_o = max(fo[0].size, fo[1].size) - 1
        deg_i = max(fi[0].size, fi[1].size) - 1
        if deg_o * deg_i > MAX_RATIONAL_DEGREE:
            return None
        return compose_rational(fo, fi)

    @property
    def is_inner(self):
        return self.outer.is_inner and self.inner.is_inner

    @property
    def depth(self):
        return 1 + max(self.outer.depth, self.inner.depth)

    def to_spec(self):
        return f"compose({self.outer.to_spec()}, {self.inner.to_spec()})"
