"""Level curves {x : g(x) = t} of a defining function on a 2-D grid.

``surface_grid`` rasterizes g over a rectangle; ``marching_squares`` walks
the 16-case cell table with linear edge interpolation and chains the
resulting segments into polylines.  Saddle cells (two opposite corners
above the level) are disambiguated by the cell-center average, which is
frozen behavior because it changes the emitted curves.
"""

import json
from dataclasses import dataclass

import numpy as np

from .grid_radon import GridImage

__all__ = [
    "LevelCurveSet",
    "surface_grid",
    "marching_squares",
    "default_levels",
    "level_curves_to_dict",
    "save_level_curves_json",
]


@dataclass
class LevelCurveSet:
    """Per-level lists of polylines; each polyline is a (k, 2) point array."""

    levels: np.ndarray
    curves: list

    def __post_init__(self):
        self.levels = np.atleast_1d(np.asarray(self.levels, dtype=float))
        if len(self.curves) != len(self.levels):
            raise ValueError("need one polyline list per level")


def surface_grid(g, bounds, resolution):
    """Evaluate ``g`` on every node of a regular grid over ``bounds``.

    ``bounds`` is (xmin, xmax, ymin, ymax); ``resolution`` is the node
    count per axis (one int or an (nx, ny) pair, at least 2 each).  A
    non-finite value aborts with the offending node location in the error.
    """
    xmin, xmax, ymin, ymax = bounds
    if not (xmax > xmin and ymax > ymin):
        raise ValueError(f"degenerate bounds {bounds}")
    if np.isscalar(resolution):
        nx = ny = int(resolution)
    else:
        nx, ny = (int(r) for r in resolution)
    if nx < 2 or ny < 2:
        raise ValueError("resolution must be at least 2 per axis")
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    xx, yy = np.meshgrid(xs, ys)
    nodes = np.column_stack([xx.ravel(), yy.ravel()])
    values = np.asarray(g.eval(nodes), dtype=float).reshape(ny, nx)
    if not np.all(np.isfinite(values)):
        i, j = np.argwhere(~np.isfinite(values))[0]
        raise ValueError(
            f"g is not finite at node (x={xs[j]!r}, y={ys[i]!r})"
        )
    return GridImage(values, (xmin, ymin),
                     (xs[1] - xs[0], ys[1] - ys[0]))


def default_levels(img, k=10, lo_pct=2.0, hi_pct=98.0):
    """k evenly spaced levels between two percentiles of the surface."""
    lo, hi = np.percentile(img.values, [lo_pct, hi_pct])
    return np.linspace(lo, hi, k)


# Cell corners: c0 = (i, j), c1 = (i, j+1), c2 = (i+1, j+1), c3 = (i+1, j);
# edges: e0 bottom (c0-c1), e1 right (c1-c2), e2 top (c3-c2), e3 left
# (c0-c3).  Case index = c0 + 2*c1 + 4*c2 + 8*c3 with "corner >= level".
_SEGMENTS = {
    0: [], 15: [],
    1: [(0, 3)], 14: [(0, 3)],
    2: [(0, 1)], 13: [(0, 1)],
    3: [(3, 1)], 12: [(3, 1)],
    4: [(1, 2)], 11: [(1, 2)],
    6: [(0, 2)], 9: [(0, 2)],
    7: [(3, 2)], 8: [(3, 2)],
}


def _edge_key(i, j, e):
    if e == 0:
        return ("h", i, j)
    if e == 2:
        return ("h", i + 1, j)
    if e == 3:
        return ("v", i, j)
    return ("v", i, j + 1)


def _edge_point(key, img, level):
    kind, i, j = key
    v = img.values
    x0 = img.origin[0] + j * img.spacing[0]
    y0 = img.origin[1] + i * img.spacing[1]
    if kind == "h":
        va, vb = v[i, j], v[i, j + 1]
        frac = (level - va) / (vb - va)
        return (x0 + frac * img.spacing[0], y0)
    va, vb = v[i, j], v[i + 1, j]
    frac = (level - va) / (vb - va)
    return (x0, y0 + frac * img.spacing[1])


def _cell_segments(idx, center_inside):
    if idx == 5:
        return [(0, 1), (2, 3)] if center_inside else [(0, 3), (1, 2)]
    if idx == 10:
        return [(0, 3), (1, 2)] if center_inside else [(0, 1), (2, 3)]
    return _SEGMENTS[idx]


def _chain(adjacency):
    """Join segments sharing edge keys into maximal chains (open first,
    then cycles), in sorted-key order for determinism."""
    chains = []
    visited = set()
    keys = sorted(adjacency)
    for start_open in (True, False):
        for key in keys:
            if key in visited:
                continue
            if start_open and len(adjacency[key]) != 1:
                continue
            chain = [key]
            visited.add(key)
            current = key
            while True:
                nxt = [k for k in adjacency[current] if k not in visited]
                if not nxt:
                    break
                current = nxt[0]
                visited.add(current)
                chain.append(current)
            if not start_open and len(adjacency[chain[-1]]) > 1:
                chain.append(chain[0])  # close the loop
            chains.append(chain)
    return chains


def marching_squares(img, levels):
    """Extract iso-curves of a gridded surface at each requested level.

    Levels outside the surface range simply produce empty polyline lists.
    Vertices are linearly interpolated along cell edges, so on a surface
    that is linear in each cell they are exact.
    """
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    v = img.values
    all_curves = []
    for level in levels:
        inside = v >= level
        c0 = inside[:-1, :-1]
        c1 = inside[:-1, 1:]
        c2 = inside[1:, 1:]
        c3 = inside[1:, :-1]
        case = (c0.astype(np.int8) + 2 * c1 + 4 * c2 + 8 * c3)
        active = np.argwhere((case != 0) & (case != 15))
        adjacency = {}
        points = {}
        for i, j in active:
            idx = int(case[i, j])
            if idx in (5, 10):
                center = 0.25 * (v[i, j] + v[i, j + 1] + v[i + 1, j + 1]
                                 + v[i + 1, j])
                segs = _cell_segments(idx, center >= level)
            else:
                segs = _SEGMENTS[idx]
            for ea, eb in segs:
                ka, kb = _edge_key(i, j, ea), _edge_key(i, j, eb)
                for key in (ka, kb):
                    if key not in points:
                        points[key] = _edge_point(key, img, level)
                adjacency.setdefault(ka, []).append(kb)
                adjacency.setdefault(kb, []).append(ka)
        polylines = [np.array([points[k] for k in chain])
                     for chain in _chain(adjacency)]
        all_curves.append(polylines)
    return LevelCurveSet(levels, all_curves)


def level_curves_to_dict(curve_set):
    return {
        "levels": [
            {
                "level": float(level),
                "polylines": [poly.tolist() for poly in polys],
            }
            for level, polys in zip(curve_set.levels, curve_set.curves)
        ]
    }


def save_level_curves_json(curve_set, path):
    with open(path, "w") as fh:
        json.dump(level_curves_to_dict(curve_set), fh)
        fh.write("\n")
