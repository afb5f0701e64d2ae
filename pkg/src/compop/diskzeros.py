"""Solutions of psi(z) = w in the unit disk, with multiplicities.

Rational maps go through the companion matrix of ``num - w * den``; other
maps are isolated by argument-principle subdivision of the disk into a
central disk and polar sectors. Either way the polished root count is
checked against a winding number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    BoundaryRootSuspected,
    CertificationMismatch,
    InfiniteValue,
    NonconvergentRoot,
    RegionOutsideDomain,
)
from .mapspec import AtomicInner, Compose, Scale, SelfMap, as_selfmap
from .mapspec.expr import _trim
from .quad import gauss_legendre01

CERT_RADIUS = 1 - 1e-9
BOUNDARY_FLAG = 1 - 1e-12
CLUSTER_RADIUS = 1e-7
MAX_NEWTON = 200
MAX_DEPTH = 40
MAX_WINDING_NODES = 2**20
# roots this close to the certification circle force a different radius
NEAR_CIRCLE = 1e-4


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def check(self):
        if not self.radius > 0:
            raise RegionOutsideDomain("disk radius must be positive")
        if abs(self.center) + self.radius >= 1:
            raise RegionOutsideDomain(f"{self} is not inside the open unit disk")

    @property
    def diameter(self):
        return 2 * self.radius

    def contains(self, z, margin=0.0):
        return abs(z - self.center) <= self.radius + margin

    def centroid(self):
        return complex(self.center)


@dataclass(frozen=True)
class Square:
    center: complex
    half_side: float

    def check(self):
        if not self.half_side > 0:
            raise RegionOutsideDomain("half_side must be positive")
        if abs(self.center) + math.sqrt(2) * self.half_side >= 1:
            raise RegionOutsideDomain(f"{self} is not inside the open unit disk")

    @property
    def diameter(self):
        return 2 * math.sqrt(2) * self.half_side

    def contains(self, z, margin=0.0):
        d = z - self.center
        h = self.half_side + margin
        return abs(d.real) <= h and abs(d.imag) <= h

    def centroid(self):
        return complex(self.center)

    def edges(self):
        c, h = complex(self.center), self.half_side
        corners = [c + h * (-1 - 1j), c + h * (1 - 1j), c + h * (1 + 1j), c + h * (-1 + 1j)]
        return [_segment(corners[k], corners[(k + 1) % 4]) for k in range(4)]


@dataclass(frozen=True)
class Sector:
    """Polar box {r_inner <= |z| <= r_outer, theta_lo <= arg z <= theta_hi}."""

    r_inner: float
    r_outer: float
    theta_lo: float
    theta_hi: float

    def check(self):
        if not (0 < self.r_inner < self.r_outer < 1 and self.theta_lo < self.theta_hi):
            raise RegionOutsideDomain(f"{self} is not a valid sector inside the unit disk")

    @property
    def diameter(self):
        dt = self.theta_hi - self.theta_lo
        return (self.r_outer - self.r_inner) + self.r_outer * min(dt, math.pi)

    def contains(self, z, margin=0.0):
        r = abs(z)
        if not (self.r_inner - margin <= r <= self.r_outer + margin):
            return False
        th = math.atan2(z.imag, z.real)
        mid = (self.theta_lo + self.theta_hi) / 2
        d = (th - mid + math.pi) % (2 * math.pi) - math.pi
        return abs(d) <= (self.theta_hi - self.theta_lo) / 2 + margin / max(r, 1e-300)

    def centroid(self):
        r = (self.r_inner + self.r_outer) / 2
        return complex(r * np.exp(1j * (self.theta_lo + self.theta_hi) / 2))

    def edges(self):
        a, b, lo, hi = self.r_inner, self.r_outer, self.theta_lo, self.theta_hi
        return [
            _segment(a * np.exp(1j * lo), b * np.exp(1j * lo)),
            _arc(b, lo, hi),
            _segment(b * np.exp(1j * hi), a * np.exp(1j * hi)),
            _arc(a, hi, lo),
        ]


Region = Union[Disk, Square, Sector]


def _segment(z0, z1):
    z0, z1 = complex(z0), complex(z1)
    return (lambda s: z0 + (z1 - z0) * s), (lambda s: np.full_like(s, z1 - z0, dtype=complex))


def _arc(r, t0, t1):
    return (lambda s: r * np.exp(1j * (t0 + (t1 - t0) * s)),
            lambda s: 1j * (t1 - t0) * r * np.exp(1j * (t0 + (t1 - t0) * s)))


def _guard(f):
    # relative to the contour's own scale so tiny disks around clusters still work
    a = np.abs(f)
    if not np.min(a) > 1e-13 * max(1.0, float(np.max(a))) * (1.0 if np.max(a) > 1e-3 else float(np.max(a))):
        raise BoundaryRootSuspected("psi - w vanishes on the region boundary")


def _argument_integral(psi, w, region, max_nodes):
    """(1/2 pi i) * contour integral of psi'/(psi - w), refined by doubling."""
    prev = None
    if isinstance(region, Disk):
        c, R = complex(region.center), region.radius
        n = 64
        while n <= max_nodes:
            e = np.exp(2j * np.pi * np.arange(n) / n)
            z = c + R * e
            f = psi(z) - w
            _guard(f)
            val = complex(np.mean(psi.derivative(z) * R * e / f))
            if prev is not None and abs(val - prev) < 1e-3 and abs(val - round(val.real)) < 0.25:
                return val
            prev = val
            n *= 2
        raise BoundaryRootSuspected(f"argument integral did not settle (last value {prev:.4g})")
    x, wts = gauss_legendre01(16)
    panels = 2
    while panels * 16 * 4 <= max_nodes:
        total = 0j
        for zf, dzf in region.edges():
            s = ((np.arange(panels)[:, None] + x[None, :]) / panels).ravel()
            ww = np.tile(wts, panels) / panels
            z = zf(s)
            f = psi(z) - w
            _guard(f)
            total += np.sum(ww * psi.derivative(z) * dzf(s) / f)
        val = complex(total / (2j * np.pi))
        if prev is not None and abs(val - prev) < 1e-3 and abs(val - round(val.real)) < 0.25:
            return val
        prev = val
        panels *= 2
    raise BoundaryRootSuspected(f"argument integral did not settle (last value {prev})")


def winding_count(psi, w, region: Region, max_nodes: int = MAX_WINDING_NODES) -> int:
    """Number of solutions of psi(z) = w inside ``region``, with multiplicity.

    If a solution sits on the contour, the region is shrunk slightly and
    the integral retried (up to three times).
    """
    psi = as_selfmap(psi)
    w = complex(w)
    region.check()
    last = None
    for attempt in range(4):
        reg = region if attempt == 0 else _perturb(region, attempt)
        try:
            return int(round(_argument_integral(psi, w, reg, max_nodes).real))
        except BoundaryRootSuspected as exc:
            last = exc
    raise last


def _perturb(region, k):
    eps = 1e-7 * 3**k
    if isinstance(region, Disk):
        return Disk(region.center, region.radius * (1 - eps))
    if isinstance(region, Square):
        return Square(region.center, region.half_side * (1 - eps))
    dr = (region.r_outer - region.r_inner) * eps
    dt = (region.theta_hi - region.theta_lo) * eps
    return Sector(region.r_inner + dr, region.r_outer - dr, region.theta_lo + dt, region.theta_hi - dt)


@dataclass(frozen=True)
class PreimageSet:
    """Solutions of psi(z) = w in the disk.

    ``roots`` and ``multiplicities`` are parallel arrays sorted by
    (modulus, argument). ``tail_mass`` estimates the counting-function
    contribution of solutions omitted because they crowd the circle
    (only nonzero for maps with infinitely many preimages).
    """

    w: complex
    roots: np.ndarray
    multiplicities: np.ndarray
    certified_total: int
    residual_bound: float
    boundary_flags: np.ndarray
    method: str
    certification_radius: float = CERT_RADIUS
    tail_mass: float = 0.0

    def __len__(self):
        return int(self.roots.size)

    def __iter__(self):
        return iter(zip(self.roots.tolist(), self.multiplicities.tolist()))

    @property
    def total(self) -> int:
        return int(self.multiplicities.sum())


def _sort_roots(roots, mults):
    if roots.size == 0:
        return roots, mults
    order = np.lexsort((np.mod(np.angle(roots), 2 * np.pi), np.round(np.abs(roots), 14)))
    return roots[order], mults[order]


def _newton(f, df, z0, tol, mult=1, max_iter=MAX_NEWTON):
    """Damped (multiplicity-aware) Newton on f; returns (z, |f(z)|)."""
    z = complex(z0)
    fz = complex(f(z))
    for _ in range(max_iter):
        if abs(fz) <= tol * 1e-3:
            break
        d = complex(df(z))
        if d == 0:
            break
        step = mult * fz / d
        lam = 1.0
        while lam > 1e-4:
            zn = z - lam * step
            fn = complex(f(zn))
            if abs(fn) < abs(fz):
                break
            lam /= 2
        else:
            break
        moved = abs(z - zn)
        z, fz = zn, fn
        if moved <= 4e-16 * max(1.0, abs(z)):
            break
    return z, abs(fz)


def _cluster(roots):
    """Greedy merge of roots closer than CLUSTER_RADIUS; returns (centres, counts)."""
    centres, counts = [], []
    used = np.zeros(roots.size, dtype=bool)
    for i in range(roots.size):
        if used[i]:
            continue
        close = (~used) & (np.abs(roots - roots[i]) <= CLUSTER_RADIUS)
        used |= close
        centres.append(complex(np.mean(roots[close])))
        counts.append(int(close.sum()))
    return np.array(centres, dtype=complex), np.array(counts, dtype=int)


def _cert_radius(moduli):
    """1 - 1e-9 unless some root crowds that circle; then the widest gap below it."""
    near = moduli[np.abs(moduli - CERT_RADIUS) < NEAR_CIRCLE]
    if near.size == 0:
        return CERT_RADIUS
    lo = 1 - 1e-2
    pts = np.sort(np.concatenate([[lo, CERT_RADIUS], moduli[(moduli > lo) & (moduli < CERT_RADIUS)]]))
    gaps = np.diff(pts)
    k = int(np.argmax(gaps))
    return float((pts[k] + pts[k + 1]) / 2)


def _polish_polynomial_roots(psi, poly, w, raw, tol):
    dpoly = P.polyder(poly) if poly.size > 1 else np.zeros(1, dtype=complex)
    f = lambda z: P.polyval(z, poly)
    df = lambda z: P.polyval(z, dpoly)
    cand = raw[np.abs(raw) < 1 + 1e-6]
    polished = np.array([_newton(f, df, z, tol)[0] for z in cand], dtype=complex)
    centres, counts = _cluster(polished)
    roots, mults = [], []
    for c, m in zip(centres, counts):
        z = _newton(f, df, c, tol, mult=m)[0] if m > 1 else c
        if abs(z) < 1:
            roots.append(z)
            mults.append(m)
    return np.array(roots, dtype=complex), np.array(mults, dtype=int)


def _companion(psi, w, tol, certify):
    num, den = psi.rational_form
    poly = _trim(P.polysub(num, w * den))
    if poly.size == 1:
        if poly[0] == 0:
            raise InfiniteValue(f"{psi.spec} is identically {w}")
        roots = np.zeros(0, dtype=complex)
        mults = np.zeros(0, dtype=int)
    else:
        raw = np.roots(poly[::-1])
        roots, mults = _polish_polynomial_roots(psi, poly, w, raw, tol)
    moduli = np.abs(roots)
    rho = CERT_RADIUS
    if certify:
        all_mod = np.abs(np.roots(poly[::-1])) if poly.size > 1 else np.zeros(0)
        rho = _cert_radius(np.concatenate([moduli, all_mod]))
        count = winding_count(psi, w, Disk(0j, rho))
        inside = int(mults[moduli < rho].sum())
        if count != inside:
            raise CertificationMismatch(
                f"{psi.spec}, w={w}: {inside} polished roots inside |z|<{rho} but winding number {count}"
            )
    return roots, mults, rho


# search radii for the subdivision path, tried in order while a root crowds the circle
SUBDIVISION_RADII = (CERT_RADIUS, 1 - 1e-7, 1 - 1e-5, 1 - 1e-4, 1 - 1e-3)


def _subdivision(psi, w, tol):
    for radius in SUBDIVISION_RADII:
        try:
            total = winding_count(psi, w, Disk(0j, radius))
            break
        except BoundaryRootSuspected as exc:
            last = exc
    else:
        raise last
    roots, mults = [], []
    f = lambda z: complex(psi(np.asarray(z, dtype=complex))) - w
    df = lambda z: complex(psi.derivative(np.asarray(z, dtype=complex)))

    def split(region):
        if isinstance(region, Disk):
            R = region.radius
            # seams rotated off the axes, where real and imaginary roots sit
            for frac, rot in ((0.5, 0.1234), (0.47, 0.4321), (0.53, 0.7777), (0.44, 1.1111)):
                yield [Disk(0j, R * frac)] + [
                    Sector(R * frac, R, k * np.pi / 2 - np.pi + rot, (k + 1) * np.pi / 2 - np.pi + rot)
                    for k in range(4)
                ]
        else:
            for frac in (0.5, 0.47, 0.53, 0.44):
                rm = region.r_inner + frac * (region.r_outer - region.r_inner)
                tm = region.theta_lo + frac * (region.theta_hi - region.theta_lo)
                yield [
                    Sector(region.r_inner, rm, region.theta_lo, tm),
                    Sector(rm, region.r_outer, region.theta_lo, tm),
                    Sector(region.r_inner, rm, tm, region.theta_hi),
                    Sector(rm, region.r_outer, tm, region.theta_hi),
                ]

    def count(region):
        if isinstance(region, Disk):
            return winding_count(psi, w, region)
        return int(round(_argument_integral(psi, w, region, MAX_WINDING_NODES).real))

    def visit(region, n, depth):
        if n == 0:
            return
        if depth > MAX_DEPTH:
            raise NonconvergentRoot(f"subdivision depth cap {MAX_DEPTH} exceeded near {region}")
        if n > 1 and region.diameter < 1e-2:
            z, res = _newton(f, df, region.centroid(), tol, mult=n)
            if res <= tol and region.contains(z, margin=1e-12) and abs(z) + CLUSTER_RADIUS < 1:
                try:
                    if winding_count(psi, w, Disk(z, CLUSTER_RADIUS)) == n:
                        roots.append(z)
                        mults.append(n)
                        return
                except BoundaryRootSuspected:
                    pass
        if n == 1 or region.diameter < CLUSTER_RADIUS / 10:
            z, res = _newton(f, df, region.centroid(), tol, mult=n)
            if res <= tol and region.contains(z, margin=1e-12):
                roots.append(z)
                mults.append(n)
                return
            if region.diameter < CLUSTER_RADIUS / 10:
                raise NonconvergentRoot(f"Newton failed in a cluster of {n} roots near {z}")
        for children in split(region):
            try:
                counts = [count(c) for c in children]
            except BoundaryRootSuspected:
                continue
            if sum(counts) == n:
                for c, k in zip(children, counts):
                    visit(c, k, depth + 1)
                return
        raise CertificationMismatch(f"child winding numbers never summed to {n} in {region}")

    visit(Disk(0j, radius), total, 0)
    roots = np.array(roots, dtype=complex)
    mults = np.array(mults, dtype=int)
    if roots.size > 1:
        centres, counts = _cluster(roots)
        if centres.size < roots.size:
            merged = [int(mults[np.abs(roots - c) <= CLUSTER_RADIUS].sum()) for c in centres]
            roots, mults = centres, np.array(merged, dtype=int)
    if int(mults.sum()) != total:
        raise CertificationMismatch(f"found {int(mults.sum())} roots, winding number {total}")
    return roots, mults, radius


def _atomic_branches(t, u, rmax=BOUNDARY_FLAG, cap=2**20):
    """All z in |z| < rmax with exp(t (z+1)/(z-1)) = u, plus the omitted tail mass."""
    if u == 0:
        return np.zeros(0, dtype=complex), 0.0
    L = complex(np.log(u))
    lr = -L.real
    if lr <= 0:
        return np.zeros(0, dtype=complex), 0.0
    # 1 - |z|^2 = 4 t lr / |v - t|^2 with v = L + 2 pi i k
    K = int(math.ceil(math.sqrt(4 * t * lr / (1 - rmax**2)) / (2 * math.pi))) + 2
    K = min(K, cap // 2)
    k = np.arange(-K, K + 1)
    v = L + 2j * np.pi * k
    z = (v + t) / (v - t)
    keep = np.abs(z) < rmax
    # tail of sum -log|z_k| ~ sum 2 t lr / (2 pi k)^2 over omitted k
    tail = 2 * (2 * t * lr / (2 * math.pi) ** 2) / max(K, 1)
    return z[keep], tail


def _atomic_path(psi, w, tol):
    expr = psi.expr
    if isinstance(expr, AtomicInner):
        outer_vals = [(complex(w), 1)]
        t = expr.t
    else:
        outer = expr.outer if isinstance(expr, Compose) else None
        inner = expr.inner
        t = inner.t
        if isinstance(expr, Scale):
            u = w / expr.r
            outer_vals = [(u, 1)] if abs(u) < 1 else []
        else:
            osm = SelfMap(outer, validate=False)
            ps = solve_preimages(osm, w, tol=tol, certify=False)
            outer_vals = list(ps)
    roots, mults = [], []
    tail = 0.0
    for u, m in outer_vals:
        z, tl = _atomic_branches(t, u)
        roots.append(z)
        mults.append(np.full(z.size, m, dtype=int))
        tail += m * tl
    roots = np.concatenate(roots) if roots else np.zeros(0, dtype=complex)
    mults = np.concatenate(mults) if mults else np.zeros(0, dtype=int)
    return roots, mults, tail


def _is_atomic_form(expr):
    if isinstance(expr, AtomicInner):
        return True
    if isinstance(expr, (Compose, Scale)) and isinstance(expr.inner, AtomicInner):
        return isinstance(expr, Scale) or expr.outer.rational() is not None
    return False


def solve_preimages(psi, w, tol: float = 1e-10, method: str = "auto", certify: bool = True) -> PreimageSet:
    """All z in the disk with psi(z) = w, with multiplicities.

    ``method`` is ``"companion"`` (rational maps), ``"subdivision"``,
    ``"atomic"`` (closed-form branches of exp(t(z+1)/(z-1))) or ``"auto"``.
    """
    psi = as_selfmap(psi)
    w = complex(w)
    if not abs(w) < 1:
        raise ValueError("target w must lie in the open unit disk")
    if not (1e-14 <= tol <= 1e-6):
        raise ValueError("tol must lie in [1e-14, 1e-6]")
    if method == "auto":
        if psi.rational_form is not None:
            method = "companion"
        elif _is_atomic_form(psi.expr):
            method = "atomic"
        else:
            method = "subdivision"
    rho = CERT_RADIUS
    tail = 0.0
    if method == "companion":
        if psi.rational_form is None:
            raise ValueError(f"{psi.spec} has no rational form")
        roots, mults, rho = _companion(psi, w, tol, certify)
    elif method == "subdivision":
        if abs(psi.psi0 - w) == 0 and psi.rational_form is not None and psi.degree == 0:
            raise InfiniteValue(f"{psi.spec} is identically {w}")
        roots, mults, rho = _subdivision(psi, w, tol)
    elif method == "atomic":
        if not _is_atomic_form(psi.expr):
            raise ValueError(f"{psi.spec} is not an atomic-inner form")
        roots, mults, tail = _atomic_path(psi, w, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    roots, mults = _sort_roots(roots, mults)
    if roots.size:
        res = np.abs(psi(roots) - w)
        # evaluation near the circle loses |psi'| * eps; allow for that rounding
        slack = 64 * np.finfo(float).eps * np.abs(psi.derivative(roots)) * np.maximum(1.0, np.abs(roots))
        res = np.maximum(res - slack, 0.0)
        bad = res > tol
        if np.any(bad):
            k = int(np.argmax(res))
            raise NonconvergentRoot(f"root {roots[k]} has residual {res[k]:.3g} > {tol}")
        resid = float(res.max())
    else:
        resid = 0.0
    return PreimageSet(
        w=w,
        roots=roots,
        multiplicities=mults,
        certified_total=int(mults.sum()),
        residual_bound=max(resid, 0.0),
        boundary_flags=roots[np.abs(roots) > BOUNDARY_FLAG],
        method=method,
        certification_radius=rho,
        tail_mass=tail,
    )


# ---- batched solving for profiles and quadrature -------------------------------------


def _inclusion_certified(polys, z, rho):
    """Rows whose Newton inclusion disks (radius d |p/p'|) are pairwise
    disjoint and none crosses |z| = rho.

    Each such disk holds exactly one root, so the count inside rho is exact.
    """
    d = z.shape[1]
    dpolys = polys[:, 1:] * np.arange(1, d + 1)[None, :]
    p = _horner(polys, z)
    dp = _horner(dpolys, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        rad = d * np.abs(p) / np.abs(dp)
    ok = np.all(np.isfinite(rad), axis=1)
    mod = np.abs(z)
    ok &= np.all(np.abs(mod - rho) > rad, axis=1)
    if d > 1:
        gap = np.abs(z[:, :, None] - z[:, None, :])
        reach = rad[:, :, None] + rad[:, None, :]
        off = ~np.eye(d, dtype=bool)[None]
        ok &= ~np.any(off & (gap <= reach), axis=(1, 2))
    return ok


def _horner(c, z):
    out = np.zeros_like(z)
    for k in range(c.shape[1] - 1, -1, -1):
        out = out * z + c[:, k, None]
    return out


def _batch_companion_roots(num, den, ws):
    """Roots of num - w den for every w (rows), shape (M, d). Rows with a
    degenerate leading coefficient come back as NaN."""
    d = max(num.size, den.size) - 1
    nn = np.zeros(d + 1, dtype=complex)
    dd = np.zeros(d + 1, dtype=complex)
    nn[: num.size] = num
    dd[: den.size] = den
    polys = nn[None, :] - ws[:, None] * dd[None, :]
    lead = polys[:, -1]
    scale = np.max(np.abs(polys), axis=1)
    good = np.abs(lead) > 1e-12 * scale
    roots = np.full((ws.size, d), np.nan + 0j)
    if d == 1:
        roots[good, 0] = -polys[good, 0] / lead[good]
        return polys, roots, good
    monic = polys[good, :-1] / lead[good, None]
    comp = np.zeros((monic.shape[0], d, d), dtype=complex)
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -monic
    roots[good] = np.linalg.eigvals(comp)
    return polys, roots, good


def _batch_newton(polys, roots, iters=60):
    dpolys = polys[:, 1:] * np.arange(1, polys.shape[1])[None, :]
    horner = _horner
    z = roots.copy()
    fz = horner(polys, z)
    for _ in range(iters):
        d = horner(dpolys, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            zn = z - fz / d
        fn = horner(polys, zn)
        better = np.isfinite(zn) & (np.abs(fn) < np.abs(fz))
        if not np.any(better):
            break
        z = np.where(better, zn, z)
        fz = np.where(better, fn, fz)
    return z


def solve_preimages_batch(psi, ws, tol: float = 1e-10, certify: bool = True):
    """Preimages for many targets at once.

    Returns an array of shape (M, d): row j holds the solutions of
    psi(z) = ws[j] in the disk (repeated by multiplicity), NaN-padded.
    Rows the vectorised path cannot certify are redone by
    :func:`solve_preimages`, whose errors propagate.
    """
    psi = as_selfmap(psi)
    ws = np.asarray(ws, dtype=complex).ravel()
    if psi.rational_form is None:
        rows = [solve_preimages(psi, w, tol=tol, certify=certify) for w in ws]
        width = max([r.total for r in rows] + [1])
        out = np.full((ws.size, width), np.nan + 0j)
        for j, r in enumerate(rows):
            z = np.repeat(r.roots, r.multiplicities)
            out[j, : z.size] = z
        return out
    num, den = psi.rational_form
    d = max(num.size, den.size) - 1
    if d == 0:
        if np.any(ws == num[0] / den[0]):
            raise InfiniteValue(f"{psi.spec} is constant and equals a requested target")
        return np.full((ws.size, 1), np.nan + 0j)
    polys, raw, good = _batch_companion_roots(num, den, ws)
    z = _batch_newton(polys, raw)
    with np.errstate(invalid="ignore"):
        inside = np.abs(z) < 1
        resid = np.where(inside, np.abs(psi(np.where(inside, z, 0)) - ws[:, None]), 0.0)
    redo = ~good | np.any(resid > tol, axis=1)
    if certify:
        mod = np.abs(z)
        crowded = np.any(np.abs(mod - CERT_RADIUS) < NEAR_CIRCLE, axis=1)
        redo |= crowded
        idx = np.flatnonzero(~redo)
        ok = _inclusion_certified(polys[idx], z[idx], CERT_RADIUS)
        redo[idx[~ok]] = True
    out = np.where(inside, z, np.nan + 0j)
    for j in np.flatnonzero(redo):
        r = solve_preimages(psi, ws[j], tol=tol, certify=certify)
        zz = np.repeat(r.roots, r.multiplicities)
        out[j] = np.nan
        out[j, : zz.size] = zz
    return out
