"""Fit classifier parameters by gradient descent on the logistic loss.

Plain (projected) gradient descent, full-batch by default: no momentum, no
schedules, nothing to tune besides the step size.  Models whose parameters
live on a unit sphere (linear / circular / polynomial families) are
re-projected after every step because the sphere is their parameter space;
for stacked perceptrons the per-row projection is opt-in via
``normalize_rows``.
"""

from dataclasses import dataclass

import numpy as np

from . import nn
from .defining_fn import DefiningFunction, MlpSurface, SigmoidHead
from .seeding import make_rng

__all__ = [
    "TrainConfig",
    "FitResult",
    "bce_loss",
    "bce_grad",
    "fit",
    "trace_to_csv",
]

_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of a descent run; ``batch=None`` means full batch."""

    lr: float
    epochs: int
    batch: int = None
    normalize_rows: bool = False
    seed: int = 0
    loss: str = "bce"

    def __post_init__(self):
        if self.lr < 0:
            raise ValueError("learning rate must be nonnegative")
        if self.epochs < 1:
            raise ValueError("need at least one epoch")
        if self.batch is not None and self.batch < 1:
            raise ValueError("batch size must be positive")
        if self.loss != "bce":
            raise ValueError(f"unsupported loss {self.loss!r}")


@dataclass
class FitResult:
    """Trained model plus the (epoch, loss, accuracy) trace, row 0 being
    the untrained state."""

    model: object
    trace: np.ndarray


def bce_loss(pred, label):
    """Binary cross-entropy with predictions clamped to [1e-12, 1-1e-12]."""
    p = np.clip(np.asarray(pred, dtype=float), _EPS, 1.0 - _EPS)
    y = np.asarray(label, dtype=float)
    return -(y * np.log(p) + (1.0 - y) * np.log1p(-p))


def bce_grad(pred, label):
    """d(bce_loss)/d(pred) under the same clamping."""
    p = np.clip(np.asarray(pred, dtype=float), _EPS, 1.0 - _EPS)
    y = np.asarray(label, dtype=float)
    return (p - y) / (p * (1.0 - p))


def _check_labels(labels):
    labels = np.asarray(labels)
    if not np.all(np.isin(labels, (0, 1))):
        raise ValueError("fit needs binary labels in {0, 1}")
    return labels.astype(float)


def _batches(n, batch, rng):
    if batch is None or batch >= n:
        yield np.arange(n)
        return
    order = rng.permutation(n)
    for start in range(0, n, batch):
        yield order[start:start + batch]


def _epoch_stats(predict, X, y):
    p = predict(X)
    return float(np.mean(bce_loss(p, y))), float(np.mean((p > 0.5) == (y == 1)))


def fit(model, data, cfg):
    """Minimize mean logistic loss over a labeled dataset.

    ``model`` is either an ``nn.MlpModel`` (its own sigmoid output supplies
    the probability) or any ``DefiningFunction`` with flat parameters whose
    value reads as a probability -- in practice ``SigmoidHead(base)``.
    Updates are functional: the input model is never mutated and the
    trained copy is returned in a :class:`FitResult` along with the
    per-epoch loss/accuracy trace.  Identical (data, cfg, model) give
    identical results.
    """
    y = _check_labels(data.labels)
    X = data.points
    rng = make_rng(cfg.seed)

    unwrap = None
    if isinstance(model, MlpSurface):
        model, unwrap = model.model, MlpSurface
    if isinstance(model, nn.MlpModel):
        trained, trace = _fit_mlp(model, X, y, cfg, rng)
    elif isinstance(model, SigmoidHead) and isinstance(model.base, MlpSurface):
        raise TypeError("train the MlpModel directly; its output is already "
                        "a probability")
    elif isinstance(model, DefiningFunction):
        trained, trace = _fit_flat(model, X, y, cfg, rng)
    else:
        raise TypeError(f"cannot train a {type(model).__name__}")
    if unwrap is not None:
        trained = unwrap(trained)
    return FitResult(trained, trace)


def _project_rows(layers):
    return [w / np.linalg.norm(w, axis=1, keepdims=True) for w in layers]


def _fit_mlp(model, X, y, cfg, rng):
    if model.input_dim != X.shape[1]:
        raise ValueError(f"model expects {model.input_dim}-D inputs, "
                         f"data is {X.shape[1]}-D")
    layers = [w.copy() for w in model.layers]
    if cfg.normalize_rows:
        layers = _project_rows(layers)
    acts = list(model.activations)
    ones = np.ones((len(X), 1))

    def current():
        return nn.MlpModel([w.copy() for w in layers], acts,
                           row_normalized=cfg.normalize_rows)

    def step(m, idx):
        nonlocal layers
        pre, post = nn._forward_trace(m, X[idx])
        p = post[-1][:, 0]
        upstream = bce_grad(p, y[idx]) / len(idx)
        deltas = nn._backward_deltas(m, pre)
        inputs = [X[idx]] + post[:-1]
        grads = [
            (deltas[k] * upstream[:, None]).T
            @ np.hstack([inputs[k], ones[:len(idx)]])
            for k in range(m.n_layers)
        ]
        layers = [w - cfg.lr * g for w, g in zip(layers, grads)]
        if cfg.normalize_rows:
            layers = _project_rows(layers)
        return p

    full_batch = cfg.batch is None or cfg.batch >= len(X)
    trace = []
    for epoch in range(1, cfg.epochs + 1):
        if full_batch:
            # the pre-update forward pass doubles as the stats for the
            # previous epoch's parameters
            p = step(current(), np.arange(len(X)))
            trace.append((epoch - 1, float(np.mean(bce_loss(p, y))),
                          float(np.mean((p > 0.5) == (y == 1)))))
        else:
            trace.append((epoch - 1,) + _epoch_stats(
                lambda pts: nn.mlp_forward(current(), pts), X, y))
            for idx in _batches(len(X), cfg.batch, rng):
                step(current(), idx)
    final = current()
    trace.append((cfg.epochs,) + _epoch_stats(
        lambda pts: nn.mlp_forward(final, pts), X, y))
    return final, np.array(trace)


def _fit_flat(model, X, y, cfg, rng):
    if model.dim != X.shape[1]:
        raise ValueError(f"model expects {model.dim}-D inputs, "
                         f"data is {X.shape[1]}-D")
    g = model

    def predict(pts):
        return np.asarray(g.eval(pts), dtype=float)

    trace = [(0,) + _epoch_stats(predict, X, y)]
    for epoch in range(1, cfg.epochs + 1):
        for idx in _batches(len(X), cfg.batch, rng):
            p = predict(X[idx])
            dldp = bce_grad(p, y[idx]) / len(idx)
            grad = dldp @ g.grad_params(X[idx])
            v = g.param_vector() - cfg.lr * grad
            # with_param_vector re-projects onto the unit sphere: that is
            # the parameter space of these families.
            g = g.with_param_vector(v)
        trace.append((epoch,) + _epoch_stats(predict, X, y))
    return g, np.array(trace)


def trace_to_csv(trace, path):
    with open(path, "w") as fh:
        fh.write("epoch,loss,accuracy\n")
        for epoch, loss, acc in trace:
            fh.write(f"{int(epoch)},{repr(float(loss))},{repr(float(acc))}\n")
