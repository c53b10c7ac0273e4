"""Decision-boundary crossing by gradient steps on the classifier surface.

Starting from a point of one class, repeatedly step along (or against) the
gradient of the probability surface until the predicted class flips; the
step budget and an optional cap on total displacement keep the walk local.
A zero gradient is reported as a stalled outcome rather than raised: flat
regions (dead relu units) are an expected place to get stuck.
"""

from dataclasses import dataclass

import numpy as np

from . import nn
from .defining_fn import DefiningFunction, MlpSurface

__all__ = ["PerturbResult", "perturb", "trajectory_to_csv"]


@dataclass
class PerturbResult:
    """Visited points, their surface values, and how the walk ended.

    ``outcome`` is one of "flipped", "max_steps", "capped", "stalled";
    ``flipped`` is consistent with the values: it is true exactly when the
    final point's predicted class (value > level) differs from the start's.
    """

    points: np.ndarray
    values: np.ndarray
    flipped: bool
    outcome: str
    displacement: float

    @property
    def steps(self):
        return len(self.points) - 1


def perturb(g, x0, gamma=0.01, max_steps=1000, target="ascend",
            max_displacement=None, level=0.5):
    """Walk from ``x0`` along the gradient of ``g`` until the class flips.

    ``g`` must be probability-valued (an ``nn.MlpModel`` with sigmoid
    output, passed directly or as ``MlpSurface``, or a ``SigmoidHead``);
    the predicted class is value > ``level``.  "ascend" steps with the
    gradient, "descend" against it.  The walk stops at a class flip, after
    ``max_steps`` steps, when the next step would move the point farther
    than ``max_displacement`` from the start, or at a zero gradient.
    """
    if isinstance(g, nn.MlpModel):
        g = MlpSurface(g)
    if not isinstance(g, DefiningFunction):
        raise TypeError("g must be a DefiningFunction or an nn.MlpModel")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (g.dim,):
        raise ValueError(f"start point must be a {g.dim}-vector")
    if gamma <= 0:
        raise ValueError("step size gamma must be positive")
    if target not in ("ascend", "descend"):
        raise ValueError(f"target must be 'ascend' or 'descend', got {target!r}")
    sign = 1.0 if target == "ascend" else -1.0

    x = x0.copy()
    points = [x.copy()]
    values = [float(g.eval(x))]
    start_class = values[0] > level
    outcome = "max_steps"
    for _ in range(max_steps):
        grad = np.asarray(g.grad_x(x), dtype=float)
        if np.linalg.norm(grad) == 0.0:
            outcome = "stalled"
            break
        candidate = x + sign * gamma * grad
        if (max_displacement is not None
                and np.linalg.norm(candidate - x0) > max_displacement):
            outcome = "capped"
            break
        x = candidate
        points.append(x.copy())
        values.append(float(g.eval(x)))
        if (values[-1] > level) != start_class:
            outcome = "flipped"
            break
    points = np.array(points)
    values = np.array(values)
    return PerturbResult(
        points=points,
        values=values,
        flipped=bool((values[-1] > level) != start_class),
        outcome=outcome,
        displacement=float(np.linalg.norm(points[-1] - x0)),
    )


def trajectory_to_csv(result, path):
    """One row per visited point: step index, coordinates, surface value."""
    d = result.points.shape[1]
    with open(path, "w") as fh:
        fh.write("step," + ",".join(f"x{i}" for i in range(d)) + ",g\n")
        for k, (pt, val) in enumerate(zip(result.points, result.values)):
            coords = ",".join(repr(float(c)) for c in pt)
            fh.write(f"{k},{coords},{repr(float(val))}\n")
