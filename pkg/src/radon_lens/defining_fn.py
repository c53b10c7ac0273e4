"""Families of scalar fields g(x, theta) whose level sets are integrated over.

Four variants share one small interface (``dim``, ``eval``, ``grad_x``):

* ``LinearProjection`` -- g(x) = theta . x, the classic hyperplane case;
* ``CircularProjection`` -- g(x) = ||x - r theta||, spherical level sets;
* ``HomogeneousPolynomial`` -- g(x) = sum_a c_a x^a over all degree-m
  monomials, m odd;
* ``MlpSurface`` -- a stacked perceptron from :mod:`radon_lens.nn`.

The first three carry a flat parameter vector constrained to the unit
sphere; constructors reject off-sphere parameters unless asked to
renormalize.  ``SigmoidHead`` composes any variant with a logistic output
so the value reads as a class probability.
"""

import json
from math import comb

import numpy as np

from . import nn
from .nn import sigmoid

__all__ = [
    "DefiningFunction",
    "LinearProjection",
    "CircularProjection",
    "HomogeneousPolynomial",
    "MlpSurface",
    "SigmoidHead",
    "enumerate_multi_indices",
    "check_homogeneity",
    "linear_from_angle",
    "to_dict",
    "from_dict",
    "save_json",
    "load_json",
]

_UNIT_TOL = 1e-9


def _unit_vector(v, normalize, what):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{what} must be a nonempty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{what} must be finite")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError(f"{what} must be nonzero")
    if normalize:
        return v / norm
    if abs(norm - 1.0) > _UNIT_TOL:
        raise ValueError(
            f"{what} must have unit norm (got {norm!r}); pass normalize=True"
        )
    return v


def _as_batch(x, dim, what="x"):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (dim,):
        raise ValueError(
            f"{what} has {x.shape[-1] if x.ndim else 0} coordinates, expected {dim}"
        )
    return x


class DefiningFunction:
    """Common surface for the g(x, theta) families."""

    @property
    def dim(self):
        raise NotImplementedError

    def eval(self, x):
        """Value of g at ``x``; batched over leading axes."""
        raise NotImplementedError

    def grad_x(self, x):
        """Gradient of g with respect to ``x``; same batching as eval."""
        raise NotImplementedError

    def __call__(self, x):
        return self.eval(x)

    # Trainable variants also provide a flat parameter view.  MlpSurface
    # does not (its parameters are the layer matrices); training handles
    # that case separately.

    def param_vector(self):
        raise NotImplementedError(f"{type(self).__name__} has no flat parameters")

    def with_param_vector(self, v):
        raise NotImplementedError(f"{type(self).__name__} has no flat parameters")

    def grad_params(self, x):
        raise NotImplementedError(f"{type(self).__name__} has no flat parameters")


class LinearProjection(DefiningFunction):
    """g(x) = theta . x with theta on the unit sphere."""

    def __init__(self, theta, normalize=False):
        self.theta = _unit_vector(theta, normalize, "theta")

    @property
    def dim(self):
        return len(self.theta)

    def eval(self, x):
        x = _as_batch(x, self.dim)
        return x @ self.theta

    def grad_x(self, x):
        x = _as_batch(x, self.dim)
        return np.broadcast_to(self.theta, x.shape).copy()

    def param_vector(self):
        return self.theta.copy()

    def with_param_vector(self, v):
        return LinearProjection(v, normalize=True)

    def grad_params(self, x):
        return np.atleast_2d(_as_batch(x, self.dim))


class CircularProjection(DefiningFunction):
    """g(x) = ||x - r theta||: distance to a center at radius r along theta.

    The gradient is undefined at the center itself; evaluating it there
    raises.  r is a fixed hyperparameter, not trained; the degenerate
    r = 0 is allowed and measures distance to the origin.
    """

    def __init__(self, theta, r=1.0, normalize=False):
        if r < 0:
            raise ValueError(f"radius must be nonnegative, got {r}")
        self.theta = _unit_vector(theta, normalize, "theta")
        self.r = float(r)

    @property
    def dim(self):
        return len(self.theta)

    @property
    def center(self):
        return self.r * self.theta

    def eval(self, x):
        x = _as_batch(x, self.dim)
        return np.linalg.norm(x - self.center, axis=-1)

    def grad_x(self, x):
        x = _as_batch(x, self.dim)
        diff = x - self.center
        dist = np.linalg.norm(diff, axis=-1)
        if np.any(dist == 0):
            raise ValueError("gradient is singular at the center r*theta")
        return diff / dist[..., None]

    def param_vector(self):
        return self.theta.copy()

    def with_param_vector(self, v):
        return CircularProjection(v, r=self.r, normalize=True)

    def grad_params(self, x):
        x = np.atleast_2d(_as_batch(x, self.dim))
        diff = x - self.center
        dist = np.linalg.norm(diff, axis=-1)
        if np.any(dist == 0):
            raise ValueError("gradient is singular at the center r*theta")
        return -self.r * diff / dist[:, None]


def enumerate_multi_indices(d, m):
    """All exponent tuples of length ``d`` summing to ``m``.

    Ordered graded-lexicographically (here: lexicographically descending,
    since all tuples share the degree), e.g. (2,0),(1,1),(0,2).  The count
    is C(d+m-1, m).
    """
    if d < 1 or m < 1:
        raise ValueError(f"need d >= 1 and m >= 1, got d={d}, m={m}")
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for first in range(remaining, -1, -1):
            rec(prefix + (first,), remaining - first, slots - 1)

    rec((), m, d)
    return out


class HomogeneousPolynomial(DefiningFunction):
    """g(x) = sum over all degree-m monomials of coeff * x^exponents.

    The degree must be odd.  Coefficients live on the unit sphere of
    dimension C(d+m-1, m) and are ordered by the frozen multi-index
    enumeration of :func:`enumerate_multi_indices`, so serialized
    coefficient vectors are unambiguous.  Degree 1 reduces to
    ``LinearProjection``.
    """

    def __init__(self, degree, coeffs, dim, normalize=False):
        if degree < 1 or degree % 2 == 0:
            raise ValueError(f"degree must be an odd positive integer, got {degree}")
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.degree = int(degree)
        self._dim = int(dim)
        self.index_table = enumerate_multi_indices(dim, degree)
        expected = comb(dim + degree - 1, degree)
        coeffs = _unit_vector(coeffs, normalize, "coeffs")
        if len(coeffs) != expected:
            raise ValueError(
                f"degree {degree} in {dim} variables has {expected} monomials, "
                f"got {len(coeffs)} coefficients"
            )
        self.coeffs = coeffs
        self._exponents = np.array(self.index_table, dtype=int)

    @property
    def dim(self):
        return self._dim

    def _monomials(self, x):
        x = _as_batch(x, self.dim)
        flat = x.reshape(-1, self.dim)
        mono = np.prod(flat[:, None, :] ** self._exponents[None, :, :], axis=2)
        return x, mono

    def eval(self, x):
        x, mono = self._monomials(x)
        vals = mono @ self.coeffs
        return float(vals[0]) if x.ndim == 1 else vals.reshape(x.shape[:-1])

    def grad_x(self, x):
        x = _as_batch(x, self.dim)
        flat = x.reshape(-1, self.dim)
        E = self._exponents
        grad = np.zeros_like(flat)
        for j in range(self.dim):
            coeff_j = self.coeffs * E[:, j]
            Ej = E.copy()
            Ej[:, j] = np.maximum(Ej[:, j] - 1, 0)  # masked terms carry coeff 0
            mono_j = np.prod(flat[:, None, :] ** Ej[None, :, :], axis=2)
            grad[:, j] = mono_j @ coeff_j
        return grad[0] if x.ndim == 1 else grad.reshape(x.shape)

    def param_vector(self):
        return self.coeffs.copy()

    def with_param_vector(self, v):
        return HomogeneousPolynomial(self.degree, v, self.dim, normalize=True)

    def grad_params(self, x):
        _, mono = self._monomials(x)
        return mono


class MlpSurface(DefiningFunction):
    """A stacked perceptron viewed as a defining function."""

    def __init__(self, model):
        if not isinstance(model, nn.MlpModel):
            raise TypeError("MlpSurface wraps an nn.MlpModel")
        self.model = model

    @property
    def dim(self):
        return self.model.input_dim

    def eval(self, x):
        return nn.mlp_forward(self.model, x)

    def grad_x(self, x):
        return nn.mlp_grad_input(self.model, x)


class SigmoidHead(DefiningFunction):
    """sigma(g(x)) for any base g: the value reads as a class probability."""

    def __init__(self, base):
        if not isinstance(base, DefiningFunction):
            raise TypeError("SigmoidHead wraps a DefiningFunction")
        self.base = base

    @property
    def dim(self):
        return self.base.dim

    def eval(self, x):
        return sigmoid(self.base.eval(x))

    def grad_x(self, x):
        z = self.base.eval(x)
        s = sigmoid(z)
        return np.asarray(s * (1.0 - s))[..., None] * self.base.grad_x(x)

    def param_vector(self):
        return self.base.param_vector()

    def with_param_vector(self, v):
        return SigmoidHead(self.base.with_param_vector(v))

    def grad_params(self, x):
        z = np.atleast_1d(self.base.eval(x))
        s = sigmoid(z)
        return (s * (1.0 - s))[:, None] * self.base.grad_params(x)


def linear_from_angle(phi):
    """Unit-direction linear projection at angle ``phi`` (radians) in R^2."""
    return LinearProjection([np.cos(phi), np.sin(phi)], normalize=True)


def check_homogeneity(g, x, lam):
    """|g(x, lam*theta) - lam*g(x, theta)| for parameter-linear families.

    Only ``LinearProjection`` and ``HomogeneousPolynomial`` are degree-one
    homogeneous in their parameters; the circular and perceptron families
    are not, and asking for the residual there raises ``TypeError``.
    """
    if isinstance(g, LinearProjection):
        x = _as_batch(x, g.dim)
        return np.abs(x @ (lam * g.theta) - lam * (x @ g.theta))
    if isinstance(g, HomogeneousPolynomial):
        x, mono = g._monomials(x)
        res = np.abs(mono @ (lam * g.coeffs) - lam * (mono @ g.coeffs))
        return float(res[0]) if x.ndim == 1 else res.reshape(x.shape[:-1])
    raise TypeError(
        f"{type(g).__name__} is not degree-one homogeneous in its parameters"
    )


def to_dict(g):
    """JSON-ready description: variant tag plus parameters."""
    if isinstance(g, LinearProjection):
        return {"variant": "linear", "theta": g.theta.tolist()}
    if isinstance(g, CircularProjection):
        return {"variant": "circular", "theta": g.theta.tolist(), "r": g.r}
    if isinstance(g, HomogeneousPolynomial):
        return {
            "variant": "homogeneous_poly",
            "degree": g.degree,
            "dim": g.dim,
            "coeffs": g.coeffs.tolist(),
            "index_table": [list(a) for a in g.index_table],
        }
    if isinstance(g, MlpSurface):
        return {"variant": "mlp", "model": nn.model_to_dict(g.model)}
    if isinstance(g, SigmoidHead):
        return {"variant": "sigmoid_head", "base": to_dict(g.base)}
    raise TypeError(f"cannot serialize {type(g).__name__}")


def from_dict(d):
    variant = d.get("variant")
    if variant == "linear":
        return LinearProjection(d["theta"])
    if variant == "circular":
        return CircularProjection(d["theta"], r=d["r"])
    if variant == "homogeneous_poly":
        g = HomogeneousPolynomial(d["degree"], d["coeffs"], d["dim"])
        stored = [tuple(a) for a in d.get("index_table", g.index_table)]
        if stored != g.index_table:
            raise ValueError("index_table does not match the frozen monomial order")
        return g
    if variant == "mlp":
        return MlpSurface(nn.model_from_dict(d["model"]))
    if variant == "sigmoid_head":
        return SigmoidHead(from_dict(d["base"]))
    raise ValueError(f"unknown defining-function variant {variant!r}")


def save_json(g, path):
    with open(path, "w") as fh:
        json.dump(to_dict(g), fh)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return from_dict(json.load(fh))
