"""Small stacked-perceptron models with exact gradients.

A model is a list of weight matrices, one per layer, each of shape
(out_width, in_width + 1): the bias is absorbed as a trailing column that
multiplies a constant input of 1.  The final layer has a single row, so the
model maps R^d to a scalar through nested activation/affine compositions.
Gradients with respect to inputs and parameters are reverse-mode and exact
(up to the stated subgradient convention at ReLU kinks).
"""

import json
from dataclasses import dataclass

import numpy as np

from .seeding import make_rng

__all__ = [
    "Activation",
    "MlpModel",
    "sigmoid",
    "mlp_forward",
    "mlp_grad_input",
    "mlp_grad_params",
    "maxpool_surface",
    "avgpool_as_matrix",
    "random_mlp",
    "mlp_from_arch",
    "model_to_dict",
    "model_from_dict",
    "save_model_json",
    "load_model_json",
]

_ROW_NORM_TOL = 1e-9


def sigmoid(z):
    """Numerically safe logistic function, exact in each branch."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def logit(p):
    p = np.asarray(p, dtype=float)
    return np.log(p) - np.log1p(-p)


@dataclass(frozen=True)
class Activation:
    """Pointwise nonlinearity tag: sigmoid, tanh, relu, leaky_relu, identity.

    The derivative of relu (and the left branch of leaky_relu) at exactly 0
    is defined as the flat-side slope, so training runs are reproducible.
    """

    kind: str
    slope: float = 0.01

    _KINDS = ("sigmoid", "tanh", "relu", "leaky_relu", "identity")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown activation {self.kind!r}")
        if self.kind == "leaky_relu" and not 0.0 < self.slope < 1.0:
            raise ValueError(f"leaky_relu slope must lie in (0,1), got {self.slope}")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "sigmoid":
            return sigmoid(z)
        if self.kind == "tanh":
            return np.tanh(z)
        if self.kind == "relu":
            return np.maximum(z, 0.0)
        if self.kind == "leaky_relu":
            return np.where(z > 0, z, self.slope * z)
        return z

    def derivative(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "sigmoid":
            s = sigmoid(z)
            return s * (1.0 - s)
        if self.kind == "tanh":
            return 1.0 - np.tanh(z) ** 2
        if self.kind == "relu":
            return np.where(z > 0, 1.0, 0.0)
        if self.kind == "leaky_relu":
            return np.where(z > 0, 1.0, self.slope)
        return np.ones_like(z)

    @property
    def invertible(self):
        return self.kind != "relu"

    def inverse(self, y):
        """Inverse map on the activation's range; relu is not invertible."""
        y = np.asarray(y, dtype=float)
        if self.kind == "sigmoid":
            return logit(y)
        if self.kind == "tanh":
            return np.arctanh(y)
        if self.kind == "leaky_relu":
            return np.where(y > 0, y, y / self.slope)
        if self.kind == "identity":
            return y
        raise ValueError("relu maps all nonpositive inputs to 0 and has no inverse")


def _as_activation(a):
    if isinstance(a, Activation):
        return a
    return Activation(a)


@dataclass
class MlpModel:
    """Weight matrices plus one activation per layer.

    ``layers[k]`` has shape (width_{k+1}, width_k + 1); the trailing column
    is the bias.  With ``row_normalized`` set, every row (bias included)
    must have unit Euclidean norm to within 1e-9.
    """

    layers: list
    activations: list
    row_normalized: bool = False

    def __post_init__(self):
        self.layers = [np.asarray(w, dtype=float) for w in self.layers]
        if not self.layers:
            raise ValueError("model needs at least one layer")
        self.activations = [_as_activation(a) for a in self.activations]
        if len(self.activations) != len(self.layers):
            raise ValueError("need exactly one activation per layer")
        for k, w in enumerate(self.layers):
            if w.ndim != 2:
                raise ValueError(f"layer {k} is not a matrix")
            if k > 0 and w.shape[1] != self.layers[k - 1].shape[0] + 1:
                raise ValueError(
                    f"layer {k} expects {w.shape[1] - 1} inputs but layer "
                    f"{k - 1} emits {self.layers[k - 1].shape[0]}"
                )
        if self.row_normalized:
            for k, w in enumerate(self.layers):
                norms = np.linalg.norm(w, axis=1)
                if np.any(np.abs(norms - 1.0) > _ROW_NORM_TOL):
                    raise ValueError(f"layer {k} rows are not unit-norm")

    @property
    def input_dim(self):
        return self.layers[0].shape[1] - 1

    @property
    def n_layers(self):
        return len(self.layers)

    def copy(self):
        return MlpModel(
            [w.copy() for w in self.layers],
            list(self.activations),
            row_normalized=self.row_normalized,
        )


def _check_input(model, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.input_dim:
        raise ValueError(
            f"input has {x.shape[-1]} coordinates, model expects {model.input_dim}"
        )
    return x


def _forward_trace(model, X):
    """Forward pass on a (N, d) batch keeping pre-activations for backprop."""
    h = X
    pre = []
    post = []
    for w, act in zip(model.layers, model.activations):
        z = h @ w[:, :-1].T + w[:, -1]
        h = act(z)
        pre.append(z)
        post.append(h)
    return pre, post


def mlp_forward(model, x):
    """Scalar response of the model at ``x``; batched over leading axes."""
    x = _check_input(model, x)
    if model.layers[-1].shape[0] != 1:
        raise ValueError("forward pass needs a single-output final layer")
    single = x.ndim == 1
    X = np.atleast_2d(x)
    flat = X.reshape(-1, X.shape[-1])
    _, post = _forward_trace(model, flat)
    out = post[-1][:, 0].reshape(X.shape[:-1])
    return float(out[0]) if single else out.reshape(x.shape[:-1])


def _backward_deltas(model, pre):
    """Per-sample sensitivities d(output)/d(pre-activation) per layer."""
    deltas = [None] * model.n_layers
    delta = model.activations[-1].derivative(pre[-1])
    deltas[-1] = delta
    for k in range(model.n_layers - 2, -1, -1):
        w_next = model.layers[k + 1][:, :-1]
        delta = (deltas[k + 1] @ w_next) * model.activations[k].derivative(pre[k])
        deltas[k] = delta
    return deltas


def mlp_grad_input(model, x):
    """Exact gradient of :func:`mlp_forward` with respect to the input."""
    x = _check_input(model, x)
    single = x.ndim == 1
    X = np.atleast_2d(x).reshape(-1, x.shape[-1])
    pre, _ = _forward_trace(model, X)
    deltas = _backward_deltas(model, pre)
    grad = deltas[0] @ model.layers[0][:, :-1]
    return grad[0] if single else grad.reshape(x.shape)


def mlp_grad_params(model, x, upstream=1.0):
    """Gradients of ``upstream * mlp_forward`` with respect to every weight.

    For a single point ``x`` and scalar ``upstream`` this returns one array
    per layer, shaped like the layer.  A batch ``x`` with a vector
    ``upstream`` accumulates the sum over the batch, which is what a
    training step needs.
    """
    x = _check_input(model, x)
    X = np.atleast_2d(x)
    up = np.broadcast_to(np.asarray(upstream, dtype=float), (len(X),))
    pre, post = _forward_trace(model, X)
    deltas = _backward_deltas(model, pre)
    grads = []
    inputs = [X] + post[:-1]
    ones = np.ones((len(X), 1))
    for k in range(model.n_layers):
        h_aug = np.hstack([inputs[k], ones])
        grads.append((deltas[k] * up[:, None]).T @ h_aug)
    return grads


def maxpool_surface(models, x):
    """Largest response over several models at ``x``.

    Ties resolve to the lowest-indexed member, which matters only if the
    caller tracks the winning surface; the pooled value is the same.
    """
    if not models:
        raise ValueError("maxpool needs at least one model")
    dims = {m.input_dim for m in models}
    if len(dims) != 1:
        raise ValueError(f"members disagree on input width: {sorted(dims)}")
    values = np.stack([mlp_forward(m, x) for m in models])
    out = np.max(values, axis=0)
    return float(out) if np.ndim(out) == 0 else out


def avgpool_as_matrix(layer, groups):
    """Collapse groups of rows of a weight matrix into their uniform means.

    Returns one row per group; a singleton group reproduces its row.  This
    realizes average pooling as an ordinary linear layer.
    """
    layer = np.asarray(layer, dtype=float)
    if not groups:
        raise ValueError("need at least one group of row indices")
    rows = []
    for group in groups:
        idx = list(group)
        if not idx:
            raise ValueError("empty row group")
        for i in idx:
            if not 0 <= i < layer.shape[0]:
                raise ValueError(f"row index {i} out of range for {layer.shape[0]} rows")
        rows.append(layer[idx].mean(axis=0))
    return np.array(rows)


def normalize_rows(model):
    """Copy of ``model`` with every weight row scaled to unit norm."""
    layers = []
    for w in model.layers:
        norms = np.linalg.norm(w, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise ValueError("cannot normalize a zero weight row")
        layers.append(w / norms)
    return MlpModel(layers, list(model.activations), row_normalized=True)


def random_mlp(widths, activation="sigmoid", final_activation="sigmoid",
               seed=0, row_normalized=False):
    """Fresh model with the given layer widths, e.g. ``[2, 50, 100, 1]``.

    Hidden layers get ``activation``, the last layer ``final_activation``.
    Weights are drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)],
    bias column included, then row-normalized when requested.
    """
    if len(widths) < 2:
        raise ValueError("need an input and an output width")
    rng = make_rng(seed)
    layers = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        layers.append(rng.uniform(-bound, bound, size=(fan_out, fan_in + 1)))
    acts = [_as_activation(activation)] * (len(layers) - 1)
    acts.append(_as_activation(final_activation))
    model = MlpModel(layers, acts)
    if row_normalized:
        model = normalize_rows(model)
    return model


def mlp_from_arch(spec, seed=0, row_normalized=False):
    """Build a random model from a ``"2-50-100-1:leaky_relu"`` string.

    The tag names the hidden activation; the output node is sigmoid so the
    response reads as a class probability.
    """
    text = spec.strip()
    if ":" in text:
        widths_part, act_part = text.split(":", 1)
    else:
        widths_part, act_part = text, "sigmoid"
    try:
        widths = [int(w) for w in widths_part.split("-")]
    except ValueError:
        raise ValueError(f"bad architecture spec {spec!r}") from None
    if len(widths) < 2 or widths[-1] != 1 or any(w < 1 for w in widths):
        raise ValueError(f"bad architecture spec {spec!r}")
    return random_mlp(widths, activation=act_part.strip(), seed=seed,
                      row_normalized=row_normalized)


def model_to_dict(model):
    return {
        "layers": [w.tolist() for w in model.layers],
        "activations": [
            {"kind": a.kind, "slope": a.slope} for a in model.activations
        ],
        "row_normalized": bool(model.row_normalized),
    }


def model_from_dict(d):
    acts = [Activation(a["kind"], a.get("slope", 0.01)) for a in d["activations"]]
    return MlpModel(d["layers"], acts, row_normalized=d.get("row_normalized", False))


def save_model_json(model, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh)
        fh.write("\n")


def load_model_json(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
