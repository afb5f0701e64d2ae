"""Empirical induced measures and Carleson-window diagnostics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ResolutionExceeded, SingularBoundaryPoint
from .mapspec import as_selfmap
from .nevanlinna import RadialProfile

TWO_PI = 2 * np.pi
# boundary values may overshoot the circle by rounding; pull them back
ROUNDING_SLACK = 1e-12


@dataclass(frozen=True)
class CarlesonWindow:
    """S(h, theta0) = {r e^{i theta}: 1 - h <= r <= 1, |theta - theta0| <= h}."""

    h: float
    theta0: float

    def __post_init__(self):
        if not (0 < self.h <= 1):
            raise ValueError("h must lie in (0, 1]")
        if not (0 <= self.theta0 < TWO_PI):
            raise ValueError("theta0 must lie in [0, 2 pi)")


class EmpiricalMeasure:
    """Weighted point masses on the closed disk.

    Induced measures are probability measures; restrictions made with
    :meth:`restrict` keep the original weights, so their total is below 1.
    """

    def __init__(self, atoms, weights, total: Optional[float] = None):
        atoms = np.asarray(atoms, dtype=complex).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if atoms.shape != weights.shape:
            raise ValueError("atoms and weights differ in length")
        if not np.all(np.isfinite(atoms)) or not np.all(np.isfinite(weights)):
            raise ValueError("atoms and weights must be finite")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        mod = np.abs(atoms)
        if np.any(mod > 1 + ROUNDING_SLACK):
            raise ValueError("atoms must lie in the closed unit disk")
        over = mod > 1
        atoms = atoms.copy()
        atoms[over] /= mod[over]
        s = math.fsum(weights)
        total = s if total is None else float(total)
        if abs(s - total) > 1e-12:
            raise ValueError(f"weights sum to {s!r}, not {total!r}")
        self.atoms = atoms
        self.weights = weights
        self.total = total
        self.atoms.flags.writeable = False
        self.weights.flags.writeable = False

    def __len__(self):
        return self.atoms.size

    def __repr__(self):
        return f"EmpiricalMeasure(n={len(self)}, total={self.total:.17g})"

    @property
    def is_probability(self) -> bool:
        return abs(self.total - 1) <= 1e-12

    def restrict(self, R: float) -> "EmpiricalMeasure":
        """Atoms with |xi| >= R, weights unchanged."""
        keep = np.abs(self.atoms) >= R
        if not np.any(keep):
            return EmpiricalMeasure(np.zeros(0, complex), np.zeros(0), 0.0)
        return EmpiricalMeasure(self.atoms[keep], self.weights[keep])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["re", "im", "weight"])
            for z, wt in zip(self.atoms, self.weights):
                w.writerow([format(z.real, ".17g"), format(z.imag, ".17g"), format(wt, ".17g")])

    @classmethod
    def from_csv(cls, path) -> "EmpiricalMeasure":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["re", "im", "weight"]:
            raise ValueError("measure CSV needs the header row re,im,weight")
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float).reshape(-1, 3)
        return cls(data[:, 0] + 1j * data[:, 1], data[:, 2])


def induced_measure(psi, n: int, sampler: str = "uniform", seed: Optional[int] = None) -> EmpiricalMeasure:
    """Push-forward of arc length under the boundary values of psi, n atoms of weight 1/n.

    ``sampler="uniform"`` uses theta_j = 2 pi j / n (shifted by half a step if
    a node is singular); ``"random"`` draws seeded uniform angles.
    """
    if n < 256 or n & (n - 1):
        raise ValueError("n must be a power of two >= 256")
    psi = as_selfmap(psi)
    if sampler == "uniform":
        theta = TWO_PI * np.arange(n) / n
    elif sampler == "random":
        theta = np.sort(np.random.default_rng(seed).uniform(0, TWO_PI, n))
    else:
        raise ValueError("sampler must be 'uniform' or 'random'")
    try:
        xi = psi.boundary(theta)
    except SingularBoundaryPoint:
        xi = psi.boundary(theta + np.pi / n)
    # exact boundary values never leave the closed disk; rounding near singular points can
    mod = np.abs(xi)
    xi = np.where(mod > 1, xi / np.where(mod > 1, mod, 1), xi)
    return EmpiricalMeasure(xi, np.full(n, 1.0 / n), total=math.fsum(np.full(n, 1.0 / n)))


def _angular_distance(phi, theta0):
    d = np.mod(phi - theta0, TWO_PI)
    return np.minimum(d, TWO_PI - d)


def _in_band(mu, h):
    mod = np.abs(mu.atoms)
    band = mod >= 1 - h
    return band, mod


def window_mass(mu: EmpiricalMeasure, window: CarlesonWindow) -> float:
    """mu(S(h, theta0)); an atom at the origin lies in every window with h = 1."""
    band, mod = _in_band(mu, window.h)
    phi = np.angle(mu.atoms[band])
    inside = _angular_distance(phi, window.theta0) <= window.h
    inside |= mod[band] == 0
    return math.fsum(mu.weights[band][inside])


def _max_window(phi, wts, h, grid):
    """Largest mass of an arc of half-width h, over edge-aligned arcs and a grid."""
    if phi.size == 0:
        return 0.0, 0.0
    phi = np.mod(phi, TWO_PI)
    order = np.argsort(phi, kind="stable")
    phi, wts = phi[order], wts[order]
    ext = np.concatenate([phi, phi + TWO_PI])
    cum = np.concatenate([[0.0], np.cumsum(np.concatenate([wts, wts]))])
    # arcs [phi_j, phi_j + 2h]; any arc's mass is dominated by the one starting at its first atom
    hi = np.searchsorted(ext, phi + 2 * h, side="right")
    lo = np.arange(phi.size)
    hi = np.minimum(hi, lo + phi.size)
    mass = cum[hi] - cum[lo]
    k = int(np.argmax(mass))
    best, arg = float(mass[k]), float(np.mod(phi[k] + h, TWO_PI))
    # centred arcs on the uniform grid
    shift = TWO_PI * (grid - h < 0)
    gl = np.searchsorted(ext, grid - h + shift, side="left")
    gh = np.searchsorted(ext, grid + h + shift, side="right")
    gh = np.minimum(gh, gl + phi.size)
    gm = cum[gh] - cum[gl]
    j = int(np.argmax(gm))
    if gm[j] > best:
        best, arg = float(gm[j]), float(grid[j])
    return best, arg


def carleson_ratio_profile(mu: EmpiricalMeasure, h_grid: Sequence[float], n_theta: int = 720) -> RadialProfile:
    """For each h, sup over theta0 of mu(S(h, theta0))/h.

    The sup is taken over a uniform theta0 grid and over arcs whose edge
    sits on an atom, where an atomic measure attains it. ``radii`` of the
    returned profile holds the h values.
    """
    h = np.asarray(h_grid, dtype=float)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("h_grid must be a nonempty list")
    if np.any(~(h > 0)) or np.any(h > 1):
        raise ValueError("h must lie in (0, 1]")
    if np.any(np.diff(h) >= 0):
        raise ValueError("h_grid must be strictly decreasing")
    if n_theta < 360:
        raise ValueError("n_theta must be >= 360")
    guard = 8 * TWO_PI / max(len(mu), 1)
    if h[-1] < guard:
        raise ResolutionExceeded(f"h = {h[-1]:g} is below the resolution guard {guard:.4g} for {len(mu)} atoms")
    grid = TWO_PI * np.arange(n_theta) / n_theta
    mod = np.abs(mu.atoms)
    phi_all = np.angle(mu.atoms)
    values, angles = [], []
    for hv in h:
        band = mod >= 1 - hv
        origin = band & (mod == 0)
        m0 = math.fsum(mu.weights[origin])
        sel = band & ~origin
        best, arg = _max_window(phi_all[sel], mu.weights[sel], hv, grid)
        values.append((best + m0) / hv)
        angles.append(arg)
    return RadialProfile(h, np.array(values), np.array(angles), np.full(h.size, n_theta, dtype=int), tuple(() for _ in h))


def poisson_of_measure(mu: EmpiricalMeasure, a) -> float:
    """sum of weight * (1 - |a|^2)/|1 - conj(a) xi|^2."""
    a = complex(a)
    if not abs(a) < 1:
        raise ValueError("|a| must be < 1")
    k = (1 - abs(a) ** 2) / np.abs(1 - a.conjugate() * mu.atoms) ** 2
    return float(np.add.reduce(mu.weights * k))
