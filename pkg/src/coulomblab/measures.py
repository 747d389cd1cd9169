"""Planar measures, logarithmic energies, mollification and the
bounded-Lipschitz metric.

The smoothed measure of an atomic base is an exact mixture of uniform
disk blocks, so pair energies reduce to the closed uniform-disk potential
with numeric quadrature only for overlapping blocks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import linprog
from scipy.sparse import coo_matrix, vstack

_PROB_TOL = 1e-12


class Configuration:
    """Ordered list of N planar points with its empirical measure."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=complex).ravel()
        if pts.size < 1:
            raise ValueError("configuration needs at least one point")
        self.points = pts

    def __len__(self) -> int:
        return self.points.size

    def empirical_measure(self) -> "AtomicMeasure":
        n = len(self)
        return AtomicMeasure(self.points, np.full(n, 1.0 / n))

    def save_csv(self, path) -> None:
        arr = np.column_stack([self.points.real, self.points.imag])
        np.savetxt(path, arr, delimiter=",", header="re,im", comments="")

    @classmethod
    def load_csv(cls, path) -> "Configuration":
        arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(arr[:, 0] + 1j * arr[:, 1])

    def __repr__(self):
        return f"Configuration(N={len(self)})"


class AtomicMeasure:
    """Weighted point measure sum_i w_i * delta(x_i), weights positive."""

    def __init__(self, points, weights=None, require_probability: bool = False):
        self.points = np.asarray(points, dtype=complex).ravel()
        if weights is None:
            n = self.points.size
            self.weights = np.full(n, 1.0 / n)
        else:
            self.weights = np.asarray(weights, dtype=float).ravel()
        if self.points.size != self.weights.size:
            raise ValueError("points and weights must have equal length")
        if self.points.size == 0:
            raise ValueError("empty measure")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if require_probability and not self.is_probability:
            raise ValueError(f"mass {self.mass()} is not 1 within {_PROB_TOL}")

    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def is_probability(self) -> bool:
        return abs(self.mass() - 1.0) <= _PROB_TOL

    def __len__(self) -> int:
        return self.points.size

    def merged(self) -> "AtomicMeasure":
        """Combine exactly coincident atoms."""
        pts, inv = np.unique(self.points, return_inverse=True)
        w = np.zeros(pts.size)
        np.add.at(w, inv, self.weights)
        return AtomicMeasure(pts, w)

    def save_csv(self, path) -> None:
        arr = np.column_stack([self.points.real, self.points.imag, self.weights])
        np.savetxt(path, arr, delimiter=",", header="re,im,weight", comments="")

    @classmethod
    def load_csv(cls, path) -> "AtomicMeasure":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        pts = arr[:, 0] + 1j * arr[:, 1]
        w = arr[:, 2] if len(header) >= 3 else None
        return cls(pts, w)

    def __repr__(self):
        return f"AtomicMeasure(n={len(self)}, mass={self.mass():.6f})"


class SmoothedMeasure:
    """Mollification of an atomic measure by uniform epsilon-disk blocks.

    The density is (pi eps^2)^{-1} sum_i w_i 1{|x_i - z| < eps}.
    """

    def __init__(self, base: AtomicMeasure, epsilon: float):
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        self.base = base
        self.epsilon = float(epsilon)

    def mass(self) -> float:
        return self.base.mass()

    @property
    def is_probability(self) -> bool:
        return self.base.is_probability

    def density(self, z):
        z = np.asarray(z, dtype=complex)
        d = np.abs(z[..., None] - self.base.points)
        inside = d < self.epsilon
        out = inside @ self.base.weights / (math.pi * self.epsilon**2)
        return out if z.ndim else float(out)

    def bounding_box(self):
        x, y = self.base.points.real, self.base.points.imag
        e = self.epsilon
        return (x.min() - e, x.max() + e, y.min() - e, y.max() + e)

    def to_atomic(self, nodes_per_block: int = 32) -> AtomicMeasure:
        """Deterministic sunflower quantization of each disk block."""
        q = nodes_per_block
        j = np.arange(q)
        golden = math.pi * (3.0 - math.sqrt(5.0))
        r = self.epsilon * np.sqrt((j + 0.5) / q)
        offsets = r * np.exp(1j * golden * j)
        pts = (self.base.points[:, None] + offsets[None, :]).ravel()
        w = np.repeat(self.base.weights / q, q)
        return AtomicMeasure(pts, w)

    def save_csv(self, path) -> None:
        path = Path(path)
        self.base.save_csv(path)
        sidecar = path.with_suffix(path.suffix + ".json")
        sidecar.write_text(json.dumps({"epsilon": self.epsilon}))

    @classmethod
    def load_csv(cls, path) -> "SmoothedMeasure":
        path = Path(path)
        sidecar = path.with_suffix(path.suffix + ".json")
        eps = json.loads(sidecar.read_text())["epsilon"]
        return cls(AtomicMeasure.load_csv(path), eps)

    def __repr__(self):
        return f"SmoothedMeasure(blocks={len(self.base)}, eps={self.epsilon})"


@dataclass(frozen=True)
class CircleMeasure:
    """Uniform probability measure on a circle."""

    center: complex = 0.0 + 0.0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def boundary_points(self, n: int):
        theta = (np.arange(n) + 0.5) * (2 * math.pi / n)
        return self.center + self.radius * np.exp(1j * theta)

    def mass(self) -> float:
        return 1.0


@dataclass(frozen=True)
class DiskUniformMeasure:
    """Uniform probability measure on a filled disk."""

    center: complex = 0.0 + 0.0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def mass(self) -> float:
        return 1.0


Measure = Union[AtomicMeasure, SmoothedMeasure, CircleMeasure, DiskUniformMeasure]


def equilibrium_discretization(K, n: int) -> AtomicMeasure:
    """n equal-weight atoms at midpoint angles of the boundary map of K."""
    theta = (np.arange(n) + 0.5) * (2 * math.pi / n)
    return AtomicMeasure(K.boundary_point(theta), np.full(n, 1.0 / n))


def smooth(nu: AtomicMeasure, epsilon: float) -> SmoothedMeasure:
    """Mollify an atomic measure by the normalized epsilon-disk indicator."""
    return SmoothedMeasure(nu, epsilon)


def uniform_disk_potential(d, eps: float):
    """Logarithmic potential of the uniform unit-mass disk of radius eps
    at distance d from its center (exact closed form)."""
    d = np.asarray(d, dtype=float)
    with np.errstate(divide="ignore"):
        outside = -np.log(np.maximum(d, eps))
    inside = -math.log(eps) + 0.5 * (1.0 - (d / eps) ** 2)
    out = np.where(d >= eps, outside, inside)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def discrete_energy(c: Configuration) -> float:
    """Off-diagonal pairwise energy N^-2 sum_{n != m} log 1/|z_n - z_m|.

    Coincident points yield +inf (the ensemble density vanishes there).
    """
    pts = c.points if isinstance(c, Configuration) else np.asarray(c, dtype=complex)
    n = pts.size
    if n < 2:
        raise ValueError("need at least two points")
    iu, ju = np.triu_indices(n, k=1)
    d = np.abs(pts[iu] - pts[ju])
    if np.any(d == 0.0):
        return math.inf
    return float(-2.0 * np.sum(np.log(d)) / n**2)


_GAUSS_CACHE: dict = {}


def _gauss(n: int):
    if n not in _GAUSS_CACHE:
        _GAUSS_CACHE[n] = leggauss(n)
    return _GAUSS_CACHE[n]


def _gauss_on(f, a: float, b: float, order: int = 32) -> float:
    x, w = _gauss(order)
    t = 0.5 * (b - a) * x + 0.5 * (a + b)
    return 0.5 * (b - a) * float(np.dot(f(t), w))


def _disk_pair_energy(d: float, eps: float) -> float:
    """Mutual energy of two uniform eps-disks at center distance d.

    Exact -log d for disjoint blocks; for overlapping blocks the angular
    average of the potential is -log max(r, d) plus a C^1 correction that
    is integrated radially with panels at the kink radii.
    """
    if d >= 2 * eps:
        return -math.log(d)
    if d == 0.0:
        return 0.25 - math.log(eps)

    def correction(r):
        # angular correction where |z - d| < eps, z = r e^{i phi}
        r = np.atleast_1d(r)
        t = (r**2 + d**2 - eps**2) / (2 * r * d)
        phi_star = np.arccos(np.clip(t, -1.0, 1.0))
        out = np.zeros_like(r)
        for i, (ri, ps) in enumerate(zip(r, phi_star)):
            if ps <= 0:
                continue

            def h(phi):
                rho2 = ri**2 + d**2 - 2 * ri * d * np.cos(phi)
                rho = np.sqrt(rho2)
                return -math.log(eps) + 0.5 * (1.0 - rho2 / eps**2) + np.log(rho)

            out[i] = 2.0 * _gauss_on(h, 0.0, ps, order=32) / (2 * math.pi)
        return out

    def radial(r):
        base = -np.log(np.maximum(r, d))
        return (base + correction(r)) * r * (2.0 / eps**2)

    # panel boundaries at the radii where the overlap geometry changes
    cuts = sorted({0.0, eps} | {x for x in (abs(d - eps), eps - d, d) if 0.0 < x < eps})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        total += _gauss_on(radial, a, b, order=48)
    return total


def continuous_energy(mu: Measure) -> float:
    """Logarithmic energy of a measure with bounded density or boundary
    parametrization.

    Smoothed measures use the exact uniform-disk self energy 1/4 - log eps
    per block and closed/numeric cross terms; circle and disk uniform
    measures use their closed-form potentials.
    """
    if isinstance(mu, CircleMeasure):
        # potential of the circle measure is constant -log r on the circle
        return -math.log(mu.radius)
    if isinstance(mu, DiskUniformMeasure):
        return 0.25 - math.log(mu.radius)
    if isinstance(mu, SmoothedMeasure):
        pts, w, eps = mu.base.points, mu.base.weights, mu.epsilon
        n = pts.size
        diff = np.abs(pts[:, None] - pts[None, :])
        energy = float(np.sum(w * w) * (0.25 - math.log(eps)))  # diagonal blocks
        iu, ju = np.triu_indices(n, k=1)
        d = diff[iu, ju]
        far = d >= 2 * eps
        with np.errstate(divide="ignore"):
            energy += float(-2.0 * np.sum(w[iu[far]] * w[ju[far]] * np.log(d[far])))
        near = ~far
        if near.any():
            cache: dict = {}
            dn = d[near]
            for dist, wi, wj in zip(dn, w[iu[near]], w[ju[near]]):
                key = round(dist / eps, 10)
                if key not in cache:
                    cache[key] = _disk_pair_energy(float(dist), eps)
                energy += 2.0 * wi * wj * cache[key]
        return energy
    if isinstance(mu, AtomicMeasure):
        raise TypeError("atomic measures have infinite continuous energy; "
                        "use discrete_energy or smooth first")
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def _green_average(mu: Measure, K) -> float:
    """Integral of the Green function of K against mu."""
    if isinstance(mu, AtomicMeasure):
        return float(np.dot(np.atleast_1d(K.green(mu.points)), mu.weights))
    if isinstance(mu, CircleMeasure):
        n, prev = 256, None
        while True:
            vals = np.atleast_1d(K.green(mu.boundary_points(n)))
            est = float(vals.mean())
            if prev is not None and abs(est - prev) < 1e-12 * max(1.0, abs(est)):
                return est
            if n >= 2**18:
                return est
            prev, n = est, 2 * n
    if isinstance(mu, DiskUniformMeasure):
        return _disk_green_average(K, mu.center, mu.radius)
    if isinstance(mu, SmoothedMeasure):
        total = 0.0
        for x, w in zip(mu.base.points, mu.base.weights):
            total += w * _disk_green_average(K, x, mu.epsilon)
        return total
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def _disk_green_average(K, center: complex, radius: float,
                        n_ring: int = 128, order: int = 24) -> float:
    """Average of green over a disk; zero if the boundary ring lies in K
    (green is subharmonic, so its max over the disk sits on the ring)."""
    theta = (np.arange(n_ring) + 0.5) * (2 * math.pi / n_ring)
    ring = center + radius * np.exp(1j * theta)
    gmax = float(np.max(np.atleast_1d(K.green(ring))))
    if gmax <= 1e-15:
        return 0.0
    x, w = _gauss(order)
    r = 0.5 * radius * (x + 1.0)
    pts = center + r[:, None] * np.exp(1j * theta[None, :])
    g = np.atleast_1d(K.green(pts.ravel())).reshape(pts.shape)
    ang = g.mean(axis=1)
    return float(np.dot(ang * r, w) * 0.5 * radius * 2.0 / radius**2)


def _support_meets_complement(mu: Measure, K) -> bool:
    """True when the support of mu carries mass off K (green > tol)."""
    from .potential import MEMBERSHIP_TOL

    if isinstance(mu, AtomicMeasure):
        g = np.atleast_1d(K.green(mu.points))
    elif isinstance(mu, CircleMeasure):
        g = np.atleast_1d(K.green(mu.boundary_points(4096)))
    elif isinstance(mu, DiskUniformMeasure):
        theta = (np.arange(1024) + 0.5) * (2 * math.pi / 1024)
        g = np.atleast_1d(K.green(mu.center + mu.radius * np.exp(1j * theta)))
    elif isinstance(mu, SmoothedMeasure):
        theta = (np.arange(256) + 0.5) * (2 * math.pi / 256)
        ring = np.exp(1j * theta) * mu.epsilon
        pts = (mu.base.points[:, None] + ring[None, :]).ravel()
        g = np.atleast_1d(K.green(pts))
    else:
        raise TypeError(f"unsupported measure type {type(mu).__name__}")
    return bool(np.any(g > MEMBERSHIP_TOL))


def weighted_energy(mu: Measure, K, ell: float) -> float:
    """Energy functional I[mu] + (2/ell) * integral of green d(mu).

    For ell = 0 the value is +inf whenever the support of mu carries mass
    off K, and plain I[mu] otherwise.  Atomic measures contribute their
    off-diagonal discrete energy.
    """
    if not 0.0 <= ell <= 1.0:
        raise ValueError("ell must lie in [0, 1]")
    if isinstance(mu, AtomicMeasure):
        energy = discrete_energy(mu.points)
    else:
        energy = continuous_energy(mu)
    if not math.isfinite(energy):
        return math.inf
    if ell == 0.0:
        return math.inf if _support_meets_complement(mu, K) else energy
    return energy + (2.0 / ell) * _green_average(mu, K)


# ---------------------------------------------------------------------------
# bounded-Lipschitz distance
# ---------------------------------------------------------------------------

def _bl_pairwise(points: np.ndarray, c: np.ndarray) -> float:
    """Primal LP: maximize sum c_i f_i over |f_i| <= 1,
    |f_i - f_j| <= |x_i - x_j|."""
    n = points.size
    iu, ju = np.triu_indices(n, k=1)
    d = np.abs(points[iu] - points[ju])
    m = iu.size
    rows = np.concatenate([np.arange(m), np.arange(m),
                           np.arange(m, 2 * m), np.arange(m, 2 * m)])
    cols = np.concatenate([iu, ju, ju, iu])
    vals = np.concatenate([np.ones(m), -np.ones(m), np.ones(m), -np.ones(m)])
    A = coo_matrix((vals, (rows, cols)), shape=(2 * m, n)).tocsr()
    res = linprog(-c, A_ub=A, b_ub=np.concatenate([d, d]), bounds=(-1, 1),
                  method="highs")
    if not res.success:
        raise RuntimeError(f"bounded-Lipschitz LP failed: {res.message}")
    return float(-res.fun)


def _bl_transport(x, wx, y, wy) -> float:
    """Equivalent transportation LP with truncated ground cost min(d, 2).

    For probability marginals the Kantorovich dual potentials are
    1-Lipschitz for min(d, 2) and have range at most 2, so after centering
    they are feasible for the primal pairwise program; the two optimal
    values coincide.
    """
    n1, n2 = x.size, y.size
    cost = np.minimum(np.abs(x[:, None] - y[None, :]), 2.0).ravel()
    ci = np.arange(n1 * n2)
    A1 = coo_matrix((np.ones(n1 * n2), (np.repeat(np.arange(n1), n2), ci)),
                    shape=(n1, n1 * n2))
    A2 = coo_matrix((np.ones(n1 * n2), (np.tile(np.arange(n2), n1), ci)),
                    shape=(n2, n1 * n2))
    A = vstack([A1, A2]).tocsr()
    res = linprog(cost, A_eq=A, b_eq=np.concatenate([wx, wy]),
                  bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(res.fun)


def bl_distance(mu: AtomicMeasure, nu: AtomicMeasure, cap_points: int = 2000,
                subsample_seed: int = 20240601, method: str = "auto") -> float:
    """Exact bounded-Lipschitz distance between atomic probability measures.

    sup of int f d(mu - nu) over |f| <= 1, Lip(f) <= 1 on the union of
    supports.  Solved as a finite LP; measures whose union support exceeds
    cap_points are subsampled i.i.d. with the documented seed, which makes
    the result an O(cap^-1/2)-accurate estimate.

    method: "pairwise" forces the primal formulation, "transport" the
    equivalent truncated-cost transportation LP, "auto" picks by size.
    """
    for m in (mu, nu):
        if not m.is_probability:
            raise ValueError("bl_distance requires probability measures")
    mu, nu = mu.merged(), nu.merged()
    if len(mu) + len(nu) > cap_points:
        rng = np.random.default_rng(subsample_seed)
        half = cap_points // 2

        def shrink(m):
            if len(m) <= half:
                return m
            idx = rng.choice(len(m), size=half, replace=True, p=m.weights / m.mass())
            return AtomicMeasure(m.points[idx], np.full(half, 1.0 / half)).merged()

        mu, nu = shrink(mu), shrink(nu)
    if method == "auto":
        method = "pairwise" if len(mu) + len(nu) <= 220 else "transport"
    if method == "pairwise":
        points = np.concatenate([mu.points, nu.points])
        pts, inv = np.unique(points, return_inverse=True)
        c = np.zeros(pts.size)
        np.add.at(c, inv[:len(mu)], mu.weights)
        np.add.at(c, inv[len(mu):], -nu.weights)
        return max(0.0, _bl_pairwise(pts, c))
    if method == "transport":
        return max(0.0, _bl_transport(mu.points, mu.weights, nu.points, nu.weights))
    raise ValueError(f"unknown method {method!r}")


def bl_to_smoothed(nu: Union[Configuration, AtomicMeasure], target: SmoothedMeasure,
                   nodes_per_block: int = 32, **kw) -> float:
    """Distance between an atomic/empirical measure and a smoothed measure,
    with the smoothed side quantized by deterministic sunflower nodes."""
    atomic = nu.empirical_measure() if isinstance(nu, Configuration) else nu
    return bl_distance(atomic, target.to_atomic(nodes_per_block), **kw)


# ---------------------------------------------------------------------------
# constructive discretization of a smoothed measure
# ---------------------------------------------------------------------------

class _StripCDF:
    """Vertical mass profile of a smoothed measure inside one strip.

    The width-density W(y) is a finite sum of chord-overlap lengths, smooth
    between explicit kink ordinates, so panelwise Gauss quadrature gives
    the conditional CDF to near machine precision.
    """

    def __init__(self, mu: SmoothedMeasure, x_left: float, x_right: float):
        eps = mu.epsilon
        px, py, w = mu.base.points.real, mu.base.points.imag, mu.base.weights
        # horizontal distance from each block center to the strip interval;
        # a block only contributes when its chord actually enters the strip
        dx = np.maximum(np.maximum(x_left - px, px - x_right), 0.0)
        keep = dx < eps
        self.x = px[keep]
        self.y = py[keep]
        self.w = w[keep]
        self.eps = eps
        self.xl, self.xr = x_left, x_right
        half_span = np.sqrt(eps**2 - dx[keep] ** 2)
        self._bottom = float(np.min(self.y - half_span)) if keep.any() else math.nan
        cuts = set()
        for xi, yi in zip(self.x, self.y):
            cuts.update((yi - eps, yi + eps))
            for edge in (x_left, x_right):
                d_edge = abs(xi - edge)
                if d_edge < eps:
                    h = math.sqrt(eps**2 - d_edge**2)
                    cuts.update((yi - h, yi + h))
        self.edges = np.array(sorted(cuts)) if cuts else np.array([])
        if self.edges.size:
            x16, w16 = _gauss(24)
            self._panel_mass = np.zeros(self.edges.size - 1)
            for i, (a, b) in enumerate(zip(self.edges[:-1], self.edges[1:])):
                t = 0.5 * (b - a) * x16 + 0.5 * (a + b)
                self._panel_mass[i] = 0.5 * (b - a) * float(np.dot(self.width_density(t), w16))
            self._cum = np.concatenate([[0.0], np.cumsum(self._panel_mass)])
        else:
            self._panel_mass = np.zeros(0)
            self._cum = np.zeros(1)

    def width_density(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros_like(t)
        for xi, yi, wi in zip(self.x, self.y, self.w):
            dy = t - yi
            inside = np.abs(dy) < self.eps
            if not inside.any():
                continue
            h = np.sqrt(np.maximum(self.eps**2 - dy[inside] ** 2, 0.0))
            seg = np.minimum(self.xr, xi + h) - np.maximum(self.xl, xi - h)
            out[inside] += wi * np.maximum(seg, 0.0)
        return out / (math.pi * self.eps**2)

    @property
    def mass(self) -> float:
        return float(self._cum[-1])

    @property
    def support_bottom(self) -> float:
        """Greatest ordinate with zero strip mass below it: the lowest
        point of any chord that enters the strip."""
        return self._bottom

    def cdf_between(self, a: float, b: float, order: int = 24) -> float:
        """Mass on a kink-free interval (single panel)."""
        x, w = _gauss(order)
        t = 0.5 * (b - a) * x + 0.5 * (a + b)
        return 0.5 * (b - a) * float(np.dot(self.width_density(t), w))

    def mass_between(self, a: float, b: float) -> float:
        """Mass of an arbitrary interval, split at the kink ordinates."""
        if b <= a:
            return 0.0
        cuts = [a] + [float(e) for e in self.edges if a < e < b] + [b]
        return sum(self.cdf_between(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]))

    def invert(self, start_y: float, start_mass: float, target: float) -> float:
        """Least y >= start_y with cumulative mass equal to target."""
        if target > self.mass - 1e-13:
            return float(self.edges[-1])
        lo, hi = start_y, float(self.edges[-1])
        acc = start_mass
        # walk panels to bracket, then bisect inside one panel
        idx = int(np.searchsorted(self.edges, start_y, side="right")) - 1
        idx = max(idx, 0)
        lo_edge = start_y
        while idx < self._panel_mass.size:
            step = self.cdf_between(lo_edge, float(self.edges[idx + 1]))
            if acc + step >= target:
                hi = float(self.edges[idx + 1])
                lo = lo_edge
                break
            acc += step
            lo_edge = float(self.edges[idx + 1])
            idx += 1
        else:
            return float(self.edges[-1])
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if acc + self.cdf_between(lo, mid) < target:
                acc += self.cdf_between(lo, mid)
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-12:
                break
        return 0.5 * (lo + hi)


@dataclass
class DiscretizeResult:
    """Strip construction output with its separation and energy diagnostics."""

    configuration: Configuration
    min_separation: float
    separation_constant: float  # min separation * sqrt(N)
    discrete_energy: float
    points_generated: int
    points_discarded: int
    strips: int

    def bl_to(self, target: SmoothedMeasure, nodes_per_block: int = 32, **kw) -> float:
        return bl_to_smoothed(self.configuration, target, nodes_per_block, **kw)


def discretize(nu_eps: SmoothedMeasure, N: int) -> DiscretizeResult:
    """Place N points on rectangle corners of exact mass 1/N inside
    ceil(sqrt(N)) vertical strips covering the support of nu_eps.

    Guarantees pairwise separation of order 1/sqrt(N) while the empirical
    measure tracks nu_eps; at most ceil(sqrt(N)) trailing points are
    discarded.
    """
    if N < 4:
        raise ValueError("need N >= 4")
    if not nu_eps.is_probability:
        raise ValueError("discretize requires a probability measure")
    M = math.ceil(math.sqrt(N))
    x_lo, x_hi, _, _ = nu_eps.bounding_box()
    width = (x_hi - x_lo) / M
    pts: list[complex] = []
    strips_used = 0
    for j in range(M):
        xl = x_lo + j * width
        strip = _StripCDF(nu_eps, xl, xl + width)
        if strip.mass <= 1e-14:
            continue
        strips_used += 1
        mj = int(math.floor(strip.mass * N + 1e-9))
        y = strip.support_bottom
        pts.append(xl + 1j * y)
        acc = 0.0
        for k in range(mj):
            y = strip.invert(y, acc, acc + 1.0 / N)
            acc += 1.0 / N
            pts.append(xl + 1j * y)
    total = len(pts)
    if total < N:
        raise AssertionError(f"strip construction produced {total} < N = {N} points")
    config = Configuration(np.asarray(pts[:N]))
    iu, ju = np.triu_indices(N, k=1)
    sep = float(np.min(np.abs(config.points[iu] - config.points[ju])))
    return DiscretizeResult(
        configuration=config,
        min_separation=sep,
        separation_constant=sep * math.sqrt(N),
        discrete_energy=discrete_energy(config),
        points_generated=total,
        points_discarded=total - N,
        strips=strips_used,
    )


class PerturbationBall:
    """Product of disks of radius c'/(3 sqrt N) around a configuration."""

    def __init__(self, center: Configuration, separation_constant: float):
        self.center = center
        n = len(center)
        self.radius = separation_constant / (3.0 * math.sqrt(n))

    def sample(self, seed=None) -> Configuration:
        rng = np.random.default_rng(seed)
        n = len(self.center)
        r = self.radius * np.sqrt(rng.random(n))
        phi = rng.uniform(0, 2 * math.pi, n)
        return Configuration(self.center.points + r * np.exp(1j * phi))

    def contains(self, c: Configuration) -> bool:
        if len(c) != len(self.center):
            return False
        return bool(np.all(np.abs(c.points - self.center.points) < self.radius))

    def energy_deviation(self, c: Configuration) -> float:
        return abs(discrete_energy(c) - discrete_energy(self.center))


def perturbation_ball(c: Configuration, separation_constant: float) -> PerturbationBall:
    """Box descriptor of admissible perturbations of a discretized
    configuration, with a uniform sampler."""
    return PerturbationBall(c, separation_constant)
