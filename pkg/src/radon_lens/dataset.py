"""Point-cloud containers, deterministic toy samplers, and CSV round-trip.

The two containers are deliberately dumb: ``LabeledDataset`` pairs points
with integer class ids, ``EmpiricalDistribution`` pairs points with
normalized weights (uniform by default).  Samplers are pure functions of
their arguments plus a seed (see :mod:`radon_lens.seeding`).
"""

from dataclasses import dataclass, field

import numpy as np

from .seeding import make_rng

__all__ = [
    "LabeledDataset",
    "EmpiricalDistribution",
    "CsvParseError",
    "sample_halfmoon",
    "sample_gaussian",
    "save_csv",
    "load_csv",
]


class CsvParseError(ValueError):
    """Raised for malformed dataset CSV input; carries the offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass
class LabeledDataset:
    """N points in R^d with integer class labels in {0..K-1}."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.points.ndim != 2 or self.points.shape[1] < 1:
            raise ValueError("points must be an (N, d) array with d >= 1")
        if len(self.points) != len(self.labels):
            raise ValueError(
                f"{len(self.points)} points but {len(self.labels)} labels"
            )
        if not np.all(np.isfinite(self.points)):
            raise ValueError("points must be finite")
        if np.any(self.labels < 0):
            raise ValueError("labels must be nonnegative class ids")

    @property
    def d(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.labels, other.labels)
        )


@dataclass
class EmpiricalDistribution:
    """N weighted sample points standing in for an unknown density.

    Weights are normalized to sum to one at construction; omitting them
    gives the usual uniform 1/N mass per point.
    """

    points: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim == 1:
            self.points = self.points[:, None]
        if self.points.ndim != 2 or len(self.points) < 1:
            raise ValueError("points must be a nonempty (N, d) array")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("points must be finite")
        if self.weights is None:
            n = len(self.points)
            self.weights = np.full(n, 1.0 / n)
        else:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (len(self.points),):
                raise ValueError("weights must be one scalar per point")
            if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
                raise ValueError("weights must be finite and nonnegative")
            total = self.weights.sum()
            if total <= 0:
                raise ValueError("weights must have positive total mass")
            self.weights = self.weights / total

    @property
    def d(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)


def sample_halfmoon(n, noise=0.1, seed=0):
    """Two interleaved half-circle classes in R^2 ("two moons").

    The first class has floor(n/2) points on the unit upper half-circle
    arc; the second has the remaining points on the flipped arc offset by
    (+1, -0.5).  Points are evenly spaced along each arc, then jittered by
    isotropic Gaussian noise of scale ``noise``.

    Parameters
    ----------
    n : int
        Total number of points, at least 2.
    noise : float
        Standard deviation of the additive jitter, >= 0.
    seed : int
        Seed for the jitter draw.

    Returns
    -------
    LabeledDataset
    """
    if n < 2:
        raise ValueError(f"need at least 2 points, got n={n}")
    if noise < 0:
        raise ValueError(f"noise must be nonnegative, got {noise}")
    n_out = n // 2
    n_in = n - n_out
    t_out = np.linspace(0.0, np.pi, n_out)
    t_in = np.linspace(0.0, np.pi, n_in)
    outer = np.column_stack([np.cos(t_out), np.sin(t_out)])
    inner = np.column_stack([1.0 - np.cos(t_in), (1.0 - np.sin(t_in)) - 0.5])
    points = np.vstack([outer, inner])
    points = points + noise * make_rng(seed).standard_normal(points.shape)
    labels = np.concatenate([np.zeros(n_out, dtype=int), np.ones(n_in, dtype=int)])
    return LabeledDataset(points, labels)


def sample_gaussian(n, mean=0.0, cov_scale=1.0, seed=0, dim=2):
    """n i.i.d. draws from an isotropic Gaussian N(mean, cov_scale^2 I).

    ``mean`` may be a scalar (broadcast to ``dim`` coordinates) or a vector,
    in which case the vector length fixes the dimension.
    """
    if n < 1:
        raise ValueError(f"need at least 1 point, got n={n}")
    if cov_scale <= 0:
        raise ValueError(f"cov_scale must be positive, got {cov_scale}")
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    if mean.size == 1:
        mean = np.full(dim, mean[0])
    points = mean + cov_scale * make_rng(seed).standard_normal((n, len(mean)))
    return EmpiricalDistribution(points)


# CSV format: one point per row, d coordinate fields then an optional
# trailing integer label field.  Coordinates are written with repr() so they
# always contain '.' or 'e'; a trailing column consisting of bare integers
# on every row is therefore unambiguously a label column.


def _format_float(x):
    return repr(float(x))


def save_csv(data, path, header=False):
    """Write a LabeledDataset (with label column) or EmpiricalDistribution
    / raw point array (coordinates only) to ``path``."""
    labels = None
    if isinstance(data, LabeledDataset):
        points, labels = data.points, data.labels
    elif isinstance(data, EmpiricalDistribution):
        points = data.points
    else:
        points = np.asarray(data, dtype=float)
    lines = []
    if header:
        cols = [f"x{i}" for i in range(points.shape[1])]
        if labels is not None:
            cols.append("label")
        lines.append(",".join(cols))
    for i, p in enumerate(points):
        fields = [_format_float(v) for v in p]
        if labels is not None:
            fields.append(str(int(labels[i])))
        lines.append(",".join(fields))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


_INT_CHARS = set("+-0123456789")


def _is_bare_int(s):
    s = s.strip()
    return bool(s) and set(s) <= _INT_CHARS and s.lstrip("+-").isdigit()


def load_csv(path):
    """Read a dataset written by :func:`save_csv`.

    A trailing all-bare-integer column is read as labels; otherwise labels
    default to zeros.  Malformed rows and rows of mixed width raise
    :class:`CsvParseError` with the offending line number (1-based).
    """
    with open(path) as fh:
        raw = fh.read().splitlines()
    rows = []
    first_line = 1
    if raw and raw[0].strip() and not _row_is_numeric(raw[0]):
        first_line = 2  # header
        raw = raw[1:]
    width = None
    for offset, line in enumerate(raw):
        lineno = first_line + offset
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise CsvParseError(
                f"expected {width} fields, found {len(fields)}", line=lineno
            )
        parsed = []
        for f in fields:
            try:
                parsed.append(float(f))
            except ValueError:
                raise CsvParseError(f"cannot parse field {f!r}", line=lineno) from None
        rows.append((parsed, fields))
    if not rows:
        raise CsvParseError("empty file: point dimension is undefined")
    labeled = width >= 2 and all(_is_bare_int(fields[-1]) for _, fields in rows)
    values = np.array([vals for vals, _ in rows])
    if labeled:
        return LabeledDataset(values[:, :-1], values[:, -1].astype(int))
    return LabeledDataset(values, np.zeros(len(values), dtype=int))


def _row_is_numeric(line):
    try:
        [float(f) for f in line.split(",")]
        return True
    except ValueError:
        return False
