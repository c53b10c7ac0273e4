"""Forward Radon transform of 2-D gridded fields and its inversion.

The forward transform integrates the field along parallel lines: for angle
phi the lines run orthogonal to theta = (cos phi, sin phi), offset by t
from the grid center.  Inversion is classic filtered back-projection: each
projection is high-pass filtered in the Fourier domain by |freq|^(d-1)
(d = 2 here) and smeared back along its own line direction; the angular
integral becomes a finite sum scaled by pi / n_angles.  The overall scale
constant is fixed by matching reconstructed total mass to the mass the
sinogram implies.

Offsets t are measured from the grid center and span the image diagonal.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .parallel import ordered_map

__all__ = [
    "GridImage",
    "GridSinogram",
    "RampFilterSpec",
    "gaussian_phantom",
    "forward_radon_grid",
    "apply_ramp_filter",
    "fbp_reconstruct",
    "fourier_slice_residual",
    "grid_image_to_csv",
    "grid_image_from_csv",
    "grid_sinogram_to_csv",
]


@dataclass
class GridImage:
    """Scalar field sampled on a regular grid.

    ``values[i, j]`` sits at physical position
    (origin[0] + j * spacing[0], origin[1] + i * spacing[1]):
    columns advance x, rows advance y.
    """

    values: np.ndarray
    origin: np.ndarray
    spacing: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or min(self.values.shape) < 2:
            raise ValueError("values must be (H, W) with H, W >= 2")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        self.origin = np.asarray(self.origin, dtype=float).reshape(2)
        spacing = np.asarray(self.spacing, dtype=float)
        self.spacing = np.array([spacing, spacing]) if spacing.ndim == 0 \
            else spacing.reshape(2)
        if np.any(self.spacing <= 0):
            raise ValueError("spacing must be positive")

    @classmethod
    def centered(cls, values, spacing):
        """Grid whose physical center is the coordinate origin."""
        values = np.asarray(values, dtype=float)
        spacing = np.asarray(spacing, dtype=float)
        if spacing.ndim == 0:
            spacing = np.array([spacing, spacing])
        h, w = values.shape
        origin = (-0.5 * (w - 1) * spacing[0], -0.5 * (h - 1) * spacing[1])
        return cls(values, origin, spacing)

    @property
    def shape(self):
        return self.values.shape

    @property
    def center(self):
        h, w = self.values.shape
        return self.origin + 0.5 * np.array([(w - 1) * self.spacing[0],
                                             (h - 1) * self.spacing[1]])

    @property
    def pixel_area(self):
        return float(self.spacing[0] * self.spacing[1])

    def total_mass(self):
        return float(self.values.sum() * self.pixel_area)

    def x_coords(self):
        return self.origin[0] + np.arange(self.values.shape[1]) * self.spacing[0]

    def y_coords(self):
        return self.origin[1] + np.arange(self.values.shape[0]) * self.spacing[1]


@dataclass
class GridSinogram:
    """Line-integral values on a (t, angle) grid, plus the geometry that
    produced them (offsets are measured from ``center``)."""

    values: np.ndarray
    t: np.ndarray
    phis: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.t = np.asarray(self.t, dtype=float)
        self.phis = np.asarray(self.phis, dtype=float)
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        if self.values.shape != (len(self.t), len(self.phis)):
            raise ValueError("values must be shaped (len(t), len(phis))")
        if len(self.t) < 2:
            raise ValueError("need at least two offsets")
        steps = np.diff(self.t)
        if np.any(steps <= 0) or not np.allclose(steps, steps[0]):
            raise ValueError("t grid must be uniformly increasing")

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    def mean_mass(self):
        """Total field mass implied by the projections (angle average)."""
        return float(self.values.sum(axis=0).mean() * self.dt)


@dataclass(frozen=True)
class RampFilterSpec:
    """|freq|^exponent high-pass response; exponent is d-1, i.e. 1 in 2-D.

    ``window`` "cosine" rolls the response off smoothly; ``cutoff`` zeroes
    everything above that fraction of Nyquist.
    """

    exponent: int = 1
    window: str = "none"
    cutoff: float = 1.0

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be nonnegative")
        if self.window not in ("none", "cosine"):
            raise ValueError(f"unknown window {self.window!r}")
        if not 0.0 < self.cutoff <= 1.0:
            raise ValueError("cutoff must lie in (0, 1]")


def gaussian_phantom(n=256, sigma=0.25, half_width=1.0):
    """Centered isotropic Gaussian density on an n x n grid over
    [-half_width, half_width]^2."""
    axis = np.linspace(-half_width, half_width, n)
    xx, yy = np.meshgrid(axis, axis)
    values = np.exp(-(xx ** 2 + yy ** 2) / (2 * sigma ** 2)) / (2 * np.pi * sigma ** 2)
    return GridImage.centered(values, axis[1] - axis[0])


def _line_samples(img, phi, t, s):
    """Bilinear samples of the field along the lines of angle phi."""
    c = img.center
    theta = np.array([np.cos(phi), np.sin(phi)])
    perp = np.array([-np.sin(phi), np.cos(phi)])
    px = c[0] + t[:, None] * theta[0] + s[None, :] * perp[0]
    py = c[1] + t[:, None] * theta[1] + s[None, :] * perp[1]
    col = (px - img.origin[0]) / img.spacing[0]
    row = (py - img.origin[1]) / img.spacing[1]
    return map_coordinates(img.values, [row, col], order=1, mode="constant",
                           cval=0.0)


def forward_radon_grid(img, n_thetas=None, n_t=None, phis=None):
    """Line integrals of a gridded field.

    Angles default to n_thetas values uniform on [0, pi); pass ``phis`` to
    evaluate explicit angles instead.  Offsets span the image diagonal, so
    no part of the field is ever cut off.  Integration steps along each
    line at the finer of the two pixel spacings using bilinear
    interpolation (zero outside the grid).

    Returns
    -------
    GridSinogram with values shaped (n_t, n_angles).
    """
    if phis is None:
        if n_thetas is None or n_thetas < 2:
            raise ValueError("need n_thetas >= 2 (or explicit phis)")
        phis = np.arange(n_thetas) * np.pi / n_thetas
    else:
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
    if n_t is None or n_t < 2:
        raise ValueError("need n_t >= 2")
    h, w = img.shape
    diag = float(np.hypot(w * img.spacing[0], h * img.spacing[1]))
    t = np.linspace(-diag / 2, diag / 2, n_t)
    n_s = max(n_t, int(np.ceil(diag / float(min(img.spacing)))) + 1)
    s = np.linspace(-diag / 2, diag / 2, n_s)
    ds = s[1] - s[0]

    def one_angle(phi):
        return _line_samples(img, phi, t, s).sum(axis=1) * ds

    columns = ordered_map(one_angle, phis)
    return GridSinogram(np.column_stack(columns), t, phis, img.center)


def _pad_length(n):
    return 1 << int(np.ceil(np.log2(2 * n)))


def apply_ramp_filter(projection, spec=RampFilterSpec(), spacing=1.0):
    """High-pass filter one projection in the Fourier domain.

    The signal is zero-padded to the next power of two past twice its
    length so circular convolution cannot wrap energy around the ends.
    Frequencies are physical (cycles per unit of ``spacing``).
    """
    projection = np.asarray(projection, dtype=float)
    if projection.ndim != 1 or len(projection) < 4:
        raise ValueError("projection must be a 1-D signal of length >= 4")
    n = len(projection)
    nfft = _pad_length(n)
    freqs = np.fft.rfftfreq(nfft, d=spacing)
    nyquist = 0.5 / spacing
    response = np.abs(freqs) ** spec.exponent
    limit = spec.cutoff * nyquist
    response[freqs > limit] = 0.0
    if spec.window == "cosine":
        inside = freqs <= limit
        response[inside] *= np.cos(0.5 * np.pi * freqs[inside] / limit)
    spectrum = np.fft.rfft(projection, n=nfft) * response
    return np.fft.irfft(spectrum, n=nfft)[:n]


def fbp_reconstruct(sino, out_shape, spec=RampFilterSpec(), spacing=None):
    """Invert a sinogram by filtered back-projection.

    Each column is ramp-filtered, then smeared back across an (H, W) output
    grid along its own angle; the angular sum is scaled by pi / n_angles
    and finally rescaled so the reconstructed total mass matches the mass
    implied by the sinogram (the absolute constant of the inversion formula
    is otherwise arbitrary on a discrete geometry).

    The output grid is centered on the sinogram's center; its spacing
    defaults to diagonal / hypot(H, W), which reproduces the source grid
    when ``out_shape`` matches it.
    """
    h, w = out_shape
    if h < 2 or w < 2:
        raise ValueError("output shape must be at least 2 x 2")
    span = float(sino.t[-1] - sino.t[0])
    if spacing is None:
        spacing = span / float(np.hypot(h, w))
    filtered = ordered_map(
        lambda k: apply_ramp_filter(sino.values[:, k], spec, spacing=sino.dt),
        range(sino.values.shape[1]),
    )
    origin = sino.center - 0.5 * np.array([(w - 1) * spacing, (h - 1) * spacing])
    xs = origin[0] + np.arange(w) * spacing - sino.center[0]
    ys = origin[1] + np.arange(h) * spacing - sino.center[1]
    xx, yy = np.meshgrid(xs, ys)
    recon = np.zeros((h, w))
    for phi, col in zip(sino.phis, filtered):
        tvals = xx * np.cos(phi) + yy * np.sin(phi)
        recon += np.interp(tvals.ravel(), sino.t, col, left=0.0,
                           right=0.0).reshape(h, w)
    recon *= np.pi / len(sino.phis)
    target = sino.mean_mass()
    got = recon.sum() * spacing * spacing
    if got > 0 and target > 0:
        recon *= target / got
    return GridImage(recon, origin, (spacing, spacing))


def _centered_spectrum(img):
    """Continuous-convention 2-D transform relative to the grid center,
    with fftshifted frequency axes."""
    h, w = img.shape
    sx, sy = img.spacing
    fx = np.fft.fftshift(np.fft.fftfreq(w, d=sx))
    fy = np.fft.fftshift(np.fft.fftfreq(h, d=sy))
    spec = np.fft.fftshift(np.fft.fft2(img.values))
    phase = np.exp(2j * np.pi * (fx[None, :] * sx * 0.5 * (w - 1)
                                 + fy[:, None] * sy * 0.5 * (h - 1)))
    return spec * phase * img.pixel_area, fx, fy


def fourier_slice_residual(img, phi, n_t=None):
    """Mismatch between the two routes of the projection-slice identity.

    Route one: 1-D Fourier transform of the angle-phi projection.  Route
    two: the radial line at angle phi through the 2-D Fourier transform of
    the field, bilinearly interpolated.  Returns their L2 difference
    normalized by the radial line's L2 norm, over radial frequencies up to
    90% of the grid Nyquist; an all-zero field returns 0 by convention.
    """
    if not np.any(img.values):
        return 0.0
    h, w = img.shape
    if n_t is None:
        n_t = 2 * max(h, w)
    sino = forward_radon_grid(img, phis=[phi], n_t=n_t)
    proj = sino.values[:, 0]
    spec2d, fx, fy = _centered_spectrum(img)

    nu_step = 1.0 / (n_t * sino.dt)
    nu_max = 0.9 * min(fx.max(), fy.max())
    nu = np.arange(0.0, nu_max, nu_step)
    proj_ft = (np.exp(-2j * np.pi * nu[:, None] * sino.t[None, :]) @ proj) * sino.dt

    ux = nu * np.cos(phi)
    uy = nu * np.sin(phi)
    col = (ux - fx[0]) / (fx[1] - fx[0])
    row = (uy - fy[0]) / (fy[1] - fy[0])
    radial = (map_coordinates(spec2d.real, [row, col], order=1)
              + 1j * map_coordinates(spec2d.imag, [row, col], order=1))
    denom = np.linalg.norm(radial)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(proj_ft - radial) / denom)


def _fmt(x):
    return repr(float(x))


def grid_image_to_csv(img, path):
    """Three header lines (H; W; spacing and origin), then the field values
    flattened row-major, one per line."""
    h, w = img.shape
    with open(path, "w") as fh:
        fh.write(f"H,{h}\n")
        fh.write(f"W,{w}\n")
        fh.write("spacing,%s,%s,origin,%s,%s\n" % (
            _fmt(img.spacing[0]), _fmt(img.spacing[1]),
            _fmt(img.origin[0]), _fmt(img.origin[1])))
        for v in img.values.ravel():
            fh.write(_fmt(v) + "\n")


def grid_image_from_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    try:
        h = int(lines[0].split(",")[1])
        w = int(lines[1].split(",")[1])
        meta = lines[2].split(",")
        spacing = (float(meta[1]), float(meta[2]))
        origin = (float(meta[4]), float(meta[5]))
        values = np.array([float(v) for v in lines[3:3 + h * w]]).reshape(h, w)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed grid-image file {path}: {exc}") from None
    return GridImage(values, origin, spacing)


def grid_sinogram_to_csv(sino, path):
    """Same layout as the empirical sinogram CSV: phi row, t row, matrix."""
    with open(path, "w") as fh:
        fh.write("phi," + ",".join(_fmt(p) for p in sino.phis) + "\n")
        fh.write("t," + ",".join(_fmt(t) for t in sino.t) + "\n")
        for rowv in sino.values:
            fh.write(",".join(_fmt(v) for v in rowv) + "\n")
