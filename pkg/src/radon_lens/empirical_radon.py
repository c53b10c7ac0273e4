"""Slices, sinograms, and push-forward densities of empirical distributions.

Projecting every sample through a defining function gives a list of scalar
values; a 1-D density estimated from those values is a slice of the data
distribution.  Sweeping a linear direction over half the circle collects
the slices into a sinogram.  The push-forward operation is the same
computation exposed under its probabilistic name: the density of h(X) for
X distributed as the sample cloud.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import EmpiricalDistribution
from .defining_fn import DefiningFunction, linear_from_angle
from .parallel import ordered_map

__all__ = [
    "Density1D",
    "Slice",
    "Sinogram",
    "project_samples",
    "estimate_density",
    "radon_slice",
    "sinogram",
    "rvt_pushforward",
    "ks_distance",
    "slice_to_csv",
    "sinogram_to_csv",
]

_MASS_TOL = 1e-6
_KDE_CHUNK = 4096


@dataclass
class Density1D:
    """Density values on a uniform grid of bin centers.

    ``mass`` holds density (not probability): sum(mass) * dt == 1.
    ``width`` records the estimator scale (KDE bandwidth or bin width).
    """

    t: np.ndarray
    mass: np.ndarray
    width: float

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.mass = np.asarray(self.mass, dtype=float)
        if self.t.ndim != 1 or len(self.t) < 2:
            raise ValueError("grid needs at least two points")
        if self.mass.shape != self.t.shape:
            raise ValueError("mass and grid shapes differ")
        if np.any(self.mass < 0):
            raise ValueError("density values must be nonnegative")
        total = self.mass.sum() * self.dt
        if abs(total - 1.0) > _MASS_TOL:
            raise ValueError(f"density integrates to {total}, not 1")

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    def cdf(self):
        """Cumulative mass evaluated at the right edge of each bin."""
        return np.cumsum(self.mass) * self.dt

    def right_edges(self):
        return self.t + 0.5 * self.dt


@dataclass
class Slice:
    """One projection: per-sample values plus their estimated density."""

    theta_id: str
    values: np.ndarray
    density: Density1D


@dataclass
class Sinogram:
    """Slice densities over a (t, angle) grid; one column per angle."""

    phis: np.ndarray
    t: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        self.phis = np.asarray(self.phis, dtype=float)
        self.t = np.asarray(self.t, dtype=float)
        self.densities = np.asarray(self.densities, dtype=float)
        if self.densities.shape != (len(self.t), len(self.phis)):
            raise ValueError("densities must be shaped (len(t), len(phis))")

    def column(self, k):
        width = float(self.t[1] - self.t[0])
        return Density1D(self.t, self.densities[:, k], width)


def project_samples(dist, g):
    """g applied to every sample point, order preserved."""
    if g.dim != dist.d:
        raise ValueError(
            f"distribution lives in R^{dist.d} but g expects R^{g.dim}"
        )
    return np.asarray(g.eval(dist.points), dtype=float)


def _weighted_std(values, weights):
    mean = np.sum(weights * values)
    return float(np.sqrt(np.sum(weights * (values - mean) ** 2)))


def _spike_density(center, resolution):
    resolution = resolution or 128
    t = np.linspace(center - 0.5, center + 0.5, resolution)
    dt = t[1] - t[0]
    mass = np.zeros(resolution)
    mass[np.argmin(np.abs(t - center))] = 1.0 / dt
    return Density1D(t, mass, float(dt))


def _kde_on_grid(t, values, weights, h):
    dens = np.zeros(len(t))
    for start in range(0, len(values), _KDE_CHUNK):
        z = values[start : start + _KDE_CHUNK]
        w = weights[start : start + _KDE_CHUNK]
        u = (t[:, None] - z[None, :]) / h
        dens += (np.exp(-0.5 * u * u) / np.sqrt(2 * np.pi)) @ w
    return dens / h


def _nearest_bin_mass(t, values, weights):
    """Degenerate-bandwidth fallback: each value's weight goes to the
    nearest grid bin."""
    dt = t[1] - t[0]
    idx = np.clip(np.round((values - t[0]) / dt).astype(int), 0, len(t) - 1)
    return np.bincount(idx, weights=weights, minlength=len(t)) / dt


def estimate_density(values, method="kde", resolution=128, weights=None, grid=None):
    """Normalized 1-D density of scalar ``values``.

    method "kde" uses a Gaussian kernel with Silverman's bandwidth
    h = 1.06 * std * n^(-1/5); "histogram" uses ``resolution`` equal-width
    bins over the data span (Freedman-Diaconis width when resolution is
    None).  The returned grid spans [min - 3h, max + 3h].  All-identical
    values yield a single-spike density rather than an error.  ``grid``
    overrides the support (used to put several slices on a common axis).

    Parameters
    ----------
    values : array of finite scalars, nonempty
    method : {"kde", "histogram"}
    resolution : int or None
        Grid points (kde) or core bin count (histogram).
    weights : optional per-value masses, normalized internally
    grid : optional uniform grid of bin centers overriding the support

    Returns
    -------
    Density1D
    """
    values = np.asarray(values, dtype=float).ravel()
    if len(values) == 0:
        raise ValueError("cannot estimate a density from no values")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    if method not in ("kde", "histogram"):
        raise ValueError(f"unknown method {method!r}")
    if weights is None:
        weights = np.full(len(values), 1.0 / len(values))
    else:
        weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    lo, hi = float(values.min()), float(values.max())

    if method == "kde":
        h = 1.06 * _weighted_std(values, weights) * len(values) ** (-0.2)
        if grid is None:
            if resolution is None or resolution < 2:
                raise ValueError("kde needs a resolution of at least 2")
            t = np.linspace(lo - 3 * h, hi + 3 * h, resolution)
            if h == 0.0 or not t[1] > t[0]:
                return _spike_density(0.5 * (lo + hi), resolution)
        else:
            t = np.asarray(grid, dtype=float)
        dt = t[1] - t[0]
        if h < 0.125 * dt:
            # kernels narrower than the grid can fall between bin centers;
            # assign weights to the nearest bin instead
            mass = _nearest_bin_mass(t, values, weights)
            width = float(dt)
        else:
            mass = _kde_on_grid(t, values, weights, h)
            width = float(h)
        total = mass.sum() * dt
        if total <= 0:
            raise ValueError("all density mass falls outside the imposed grid")
        return Density1D(t, mass / total, width)

    # histogram
    if grid is None:
        span = hi - lo
        if span == 0.0:
            return _spike_density(lo, resolution)
        if resolution is None:
            q75, q25 = np.quantile(values, [0.75, 0.25])
            iqr = q75 - q25
            if iqr == 0.0:
                return _spike_density(lo, resolution)
            w = 2.0 * iqr * len(values) ** (-1.0 / 3.0)
            n_core = max(1, int(np.ceil(span / w)))
        else:
            if resolution < 1:
                raise ValueError("histogram needs at least one bin")
            n_core = resolution
        w = span / n_core
        edges = lo - 3 * w + np.arange(n_core + 7) * w
    else:
        t = np.asarray(grid, dtype=float)
        w = t[1] - t[0]
        edges = np.concatenate([t - 0.5 * w, [t[-1] + 0.5 * w]])
    counts, _ = np.histogram(values, bins=edges, weights=weights)
    inside = counts.sum()
    if inside <= 0:
        raise ValueError("all density mass falls outside the imposed grid")
    mass = counts / (inside * w)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return Density1D(centers, mass, float(w))


def radon_slice(dist, g, resolution=128, method="kde", theta_id=None):
    """Project the distribution through ``g`` and estimate the 1-D density."""
    values = project_samples(dist, g)
    density = estimate_density(values, method=method, resolution=resolution,
                               weights=dist.weights)
    if theta_id is None:
        theta_id = type(g).__name__
    return Slice(str(theta_id), values, density)


def sinogram(dist, n_thetas, resolution=128, method="kde"):
    """Linear slices at angles k*pi/n_thetas, k = 0..n_thetas-1, on a shared
    t grid (one column per angle).

    Covering [0, pi) suffices: the slice at phi + pi is the t-reversal of
    the slice at phi.  Only d = 2 distributions are supported.
    """
    if dist.d != 2:
        raise ValueError(f"sinogram needs a 2-D distribution, got d={dist.d}")
    if n_thetas < 1:
        raise ValueError("need at least one angle")
    phis = np.arange(n_thetas) * np.pi / n_thetas
    value_lists = [project_samples(dist, linear_from_angle(p)) for p in phis]
    bandwidths = [
        1.06 * _weighted_std(v, dist.weights) * len(v) ** (-0.2)
        for v in value_lists
    ]
    pad = 3.0 * max(bandwidths) if max(bandwidths) > 0 else 0.5
    lo = min(v.min() for v in value_lists)
    hi = max(v.max() for v in value_lists)
    t = np.linspace(lo - pad, hi + pad, resolution)

    def column(values):
        return estimate_density(values, method=method, resolution=resolution,
                                weights=dist.weights, grid=t).mass

    columns = ordered_map(column, value_lists)
    return Sinogram(phis, t, np.column_stack(columns))


def rvt_pushforward(dist, h, resolution=128, method="kde"):
    """Density of h(X) for X following the empirical distribution.

    ``h`` may be a DefiningFunction or any callable; callables are tried on
    the full (N, d) point array first and fall back to per-point calls.
    For defining functions this coincides with the density of
    :func:`radon_slice` -- projecting samples is the empirical form of
    pushing the distribution through the map.
    """
    if isinstance(h, DefiningFunction):
        values = project_samples(dist, h)
    else:
        try:
            values = np.asarray(h(dist.points), dtype=float)
            if values.shape != (len(dist),):
                raise ValueError
        except Exception:
            values = np.array([float(h(p)) for p in dist.points])
    return estimate_density(values, method=method, resolution=resolution,
                            weights=dist.weights)


def ks_distance(density, other):
    """Kolmogorov-Smirnov distance between a Density1D and a reference.

    ``other`` is a second Density1D on the same grid, or a callable CDF
    evaluated at the right bin edges.
    """
    f1 = density.cdf()
    if isinstance(other, Density1D):
        if len(other.t) != len(density.t) or not np.allclose(other.t, density.t):
            raise ValueError("densities must share a grid")
        f2 = other.cdf()
    else:
        f2 = np.asarray(other(density.right_edges()), dtype=float)
    return float(np.max(np.abs(f1 - f2)))


def _fmt(x):
    return repr(float(x))


def slice_to_csv(sl, path):
    """Two columns, t and density, one grid point per row."""
    dens = sl.density if isinstance(sl, Slice) else sl
    with open(path, "w") as fh:
        for t, m in zip(dens.t, dens.mass):
            fh.write(f"{_fmt(t)},{_fmt(m)}\n")


def sinogram_to_csv(sino, path):
    """Header rows for the angle and t grids, then the density matrix
    (one row per t, one column per angle)."""
    with open(path, "w") as fh:
        fh.write("phi," + ",".join(_fmt(p) for p in sino.phis) + "\n")
        fh.write("t," + ",".join(_fmt(t) for t in sino.t) + "\n")
        for row in sino.densities:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
