"""Linear statistics, moments, marginal-intensity histograms, the
n-point symmetrizer, and the large-deviation rate function.

Monte Carlo estimates are always compared against targets computed by
tensorized boundary quadrature, so reported z-scores probe the chain
alone and not the quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .measures import Configuration, Measure, weighted_energy
from .potential import CompactSet, equilibrium_integral, robin_energy
from .sampler import Chain, EnsembleParams


def symmetrize(f: Callable, state: Configuration, n: int):
    """Average of f over ordered n-tuples of distinct particle indices.

    Agrees with the n-fold tensor average of the empirical measure up to
    O(1/N); exactly equal for n = 1.  f must accept n broadcastable
    complex array arguments.
    """
    pts = state.points if isinstance(state, Configuration) else np.asarray(state, dtype=complex)
    N = pts.size
    if n < 1 or n > 3:
        raise ValueError("supported orders are n in {1, 2, 3}")
    if n > N:
        raise ValueError("order exceeds configuration size")
    if n == 1:
        return np.mean(f(pts))
    if n == 2:
        full = np.sum(f(pts[:, None], pts[None, :]))
        diag = np.sum(f(pts, pts))
        return (full - diag) / (N * (N - 1))
    full = np.sum(f(pts[:, None, None], pts[None, :, None], pts[None, None, :]))
    s12 = np.sum(f(pts[:, None], pts[:, None], pts[None, :]))
    s13 = np.sum(f(pts[:, None], pts[None, :], pts[:, None]))
    s23 = np.sum(f(pts[None, :], pts[:, None], pts[:, None]))
    s123 = np.sum(f(pts, pts, pts))
    distinct = full - s12 - s13 - s23 + 2.0 * s123
    return distinct / (N * (N - 1) * (N - 2))


def tensor_integral(f: Callable, state: Configuration, n: int):
    """Plain n-fold tensor average of f over the empirical measure."""
    pts = state.points if isinstance(state, Configuration) else np.asarray(state, dtype=complex)
    N = pts.size
    if n == 1:
        return np.mean(f(pts))
    if n == 2:
        return np.sum(f(pts[:, None], pts[None, :])) / N**2
    if n == 3:
        return np.sum(f(pts[:, None, None], pts[None, :, None], pts[None, None, :])) / N**3
    raise ValueError("supported orders are n in {1, 2, 3}")


def equilibrium_tensor_integral(K: CompactSet, f: Callable, n: int,
                                tol: float = 1e-9):
    """Integral of f against the n-fold product equilibrium measure by
    tensorized boundary quadrature with dyadic refinement."""
    if n == 1:
        return equilibrium_integral(K, f, tol=tol)
    max_m = 2048 if n == 2 else 192
    m, prev = 32, None
    while True:
        theta = (np.arange(m) + 0.5) * (2 * math.pi / m)
        p = K.boundary_point(theta)
        if n == 2:
            est = complex(np.mean(f(p[:, None], p[None, :])))
        else:
            acc = 0.0 + 0.0j
            for i in range(m):  # chunk the m^3 grid along the first axis
                acc += np.sum(f(p[i], p[:, None], p[None, :]))
            est = complex(acc / m**3)
        if prev is not None and abs(est - prev) < tol * max(1.0, abs(est)):
            break
        if m >= max_m:
            break
        prev, m = est, 2 * m
    if abs(est.imag) < 1e-12 * max(1.0, abs(est.real)):
        return est.real
    return est


@dataclass
class LinearStatReport:
    estimate: complex
    stderr: float
    ess: float
    target: complex
    zscore: float
    order: int
    label: str = ""

    def to_dict(self) -> dict:
        def enc(v):
            v = complex(v)
            return v.real if v.imag == 0 else [v.real, v.imag]
        return {"label": self.label, "order": self.order,
                "estimate": enc(self.estimate), "stderr": self.stderr,
                "ess": self.ess, "target": enc(self.target), "zscore": self.zscore}


def _batch_report(series: np.ndarray, target: complex, order: int, label: str) -> LinearStatReport:
    L = series.size
    est = complex(series.mean())
    nbatch = math.ceil(math.sqrt(L))
    m = L // nbatch
    trimmed = series[: nbatch * m].reshape(nbatch, m)
    bmeans = trimmed.mean(axis=1)
    var_b = float(np.mean(np.abs(bmeans - np.mean(bmeans)) ** 2))
    stderr = math.sqrt(var_b / nbatch) if nbatch > 1 else 0.0
    var_series = float(np.mean(np.abs(series - est) ** 2))
    tau = m * var_b / var_series if var_series > 0 else 1.0
    ess = min(float(L), L / max(tau, 1e-12)) if var_series > 0 else float(L)
    diff = complex(est) - complex(target)
    if stderr > 0:
        z = diff.real / stderr if abs(diff.imag) < 1e-14 * max(1.0, abs(diff.real)) \
            else abs(diff) / stderr
    else:
        z = 0.0 if diff == 0 else math.inf
    return LinearStatReport(est, stderr, ess, target, float(z), order, label)


def linear_statistic(chain: Chain, f: Callable, n: int = 1, label: str = "") -> LinearStatReport:
    """Monte Carlo estimate of the n-point marginal integral of f with a
    batch-means standard error and the quadrature target."""
    if len(chain) < 1000:
        raise ValueError("need at least 1000 stored post-burn-in states")
    series = np.asarray([symmetrize(f, Configuration(s), n) for s in chain.states])
    target = equilibrium_tensor_integral(chain.K, f, n)
    return _batch_report(series, target, n, label)


def moment_statistic(chain: Chain, f: Callable, k: int, m: int, label: str = "") -> LinearStatReport:
    """Monte Carlo estimate of (int f d omega)^k (int conj(f) d omega)^m
    against the product of equilibrium averages."""
    if len(chain) < 1000:
        raise ValueError("need at least 1000 stored post-burn-in states")
    u = np.asarray([np.mean(f(s)) for s in chain.states])
    series = u**k * np.conj(u) ** m
    base = complex(equilibrium_integral(chain.K, f))
    target = base**k * np.conj(base) ** m
    return _batch_report(series, target, k + m, label)


# ---------------------------------------------------------------------------
# rate function
# ---------------------------------------------------------------------------

@dataclass
class RateReport:
    descriptor: str
    ell: float
    weighted: float       # I_ell[nu]
    robin: float          # I[omega_K]
    rate: float           # (beta/2)(I_ell[nu] - I[omega_K])

    def to_dict(self) -> dict:
        return {"measure": self.descriptor, "ell": self.ell,
                "weighted_energy": self.weighted, "robin_energy": self.robin,
                "rate": self.rate}


def _rate(nu: Measure, K: CompactSet, ell: float, beta: float, label: str) -> RateReport:
    w = weighted_energy(nu, K, ell)
    r = robin_energy(K)
    rate = (beta / 2.0) * (w - r) if math.isfinite(w) else math.inf
    return RateReport(label or repr(nu), ell, w, r, rate)


def rate_function(nu: Measure, K: CompactSet, params: EnsembleParams,
                  label: str = "") -> RateReport:
    """Large-deviation rate of finding the empirical measure near nu."""
    return _rate(nu, K, params.ell(), params.beta, label)


def positivity_scan(K: CompactSet, family: Sequence[tuple[str, Measure]],
                    ells: Sequence[float], beta: float = 2.0) -> list[RateReport]:
    """Rate-function table over a family of test measures and an ell grid."""
    return [_rate(nu, K, ell, beta, label) for label, nu in family for ell in ells]


# ---------------------------------------------------------------------------
# intensity histogram
# ---------------------------------------------------------------------------

@dataclass
class IntensityHistogram:
    x_edges: np.ndarray
    y_edges: np.ndarray
    density: np.ndarray    # shape (nx, ny), integrates to one
    total_points: int

    @property
    def cell_area(self) -> float:
        return float((self.x_edges[1] - self.x_edges[0]) * (self.y_edges[1] - self.y_edges[0]))

    def centers(self):
        xc = 0.5 * (self.x_edges[:-1] + self.x_edges[1:])
        yc = 0.5 * (self.y_edges[:-1] + self.y_edges[1:])
        return xc, yc

    def mass(self) -> float:
        return float(self.density.sum() * self.cell_area)

    def mass_in(self, predicate: Callable) -> float:
        """Probability mass of cells whose center satisfies the predicate."""
        xc, yc = self.centers()
        zz = xc[:, None] + 1j * yc[None, :]
        return float(self.density[predicate(zz)].sum() * self.cell_area)

    def to_csv(self, path) -> None:
        xc, yc = self.centers()
        rows = [(x, y, self.density[i, j])
                for i, x in enumerate(xc) for j, y in enumerate(yc)]
        np.savetxt(path, np.asarray(rows), delimiter=",",
                   header="bin_center_re,bin_center_im,density", comments="")


def intensity_histogram(chain: Chain, bounds: Optional[tuple] = None,
                        bins: int = 64) -> IntensityHistogram:
    """Single-particle intensity estimate: all particles of all stored
    states binned on a rectangular grid and normalized to unit mass."""
    pts = np.concatenate(chain.states)
    if bounds is None:
        cap = chain.K.capacity()
        pad = (math.e - 1.0) * cap  # covers the green <= 1 neighborhood
        theta = np.linspace(0, 2 * math.pi, 256)
        b = chain.K.boundary_point(theta)
        bounds = (b.real.min() - pad, b.real.max() + pad,
                  b.imag.min() - pad, b.imag.max() + pad)
    x0, x1, y0, y1 = bounds
    counts, xe, ye = np.histogram2d(pts.real, pts.imag, bins=bins,
                                    range=[[x0, x1], [y0, y1]])
    cell = (xe[1] - xe[0]) * (ye[1] - ye[0])
    density = counts / (pts.size * cell)
    return IntensityHistogram(xe, ye, density, pts.size)
