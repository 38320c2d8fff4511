"""Iso-lines of sampled scalar fields by marching squares."""
from __future__ import annotations

from typing import Callable, List

import numpy as np

# For each of the 16 corner sign patterns, pairs of cell edges to join.
# Corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); edges: 0 bottom, 1 right, 2 top, 3 left.
_CASES = {
    0: [], 15: [],
    1: [(3, 0)], 14: [(3, 0)],
    2: [(0, 1)], 13: [(0, 1)],
    3: [(3, 1)], 12: [(3, 1)],
    4: [(1, 2)], 11: [(1, 2)],
    6: [(0, 2)], 9: [(0, 2)],
    7: [(3, 2)], 8: [(3, 2)],
}
_CORNER_EDGES = {0: (3, 0), 1: (0, 1), 2: (1, 2), 3: (3, 2)}


def _edge_point(edge, i, j, x, y, F, iso):
    if edge == 0:
        a, b = (i, j), (i + 1, j)
    elif edge == 1:
        a, b = (i + 1, j), (i + 1, j + 1)
    elif edge == 2:
        a, b = (i, j + 1), (i + 1, j + 1)
    else:
        a, b = (i, j), (i, j + 1)
    fa, fb = F[a], F[b]
    t = 0.5 if fb == fa else (iso - fa) / (fb - fa)
    return (x[a[0]] + t * (x[b[0]] - x[a[0]]), y[a[1]] + t * (y[b[1]] - y[a[1]]))


def marching_squares(x: np.ndarray, y: np.ndarray, F: np.ndarray, iso: float = 0.0) -> List[np.ndarray]:
    """Polylines where the grid samples ``F[i, j] = f(x[i], y[j])`` cross ``iso``.

    Saddle cells are disambiguated by the cell-centre average.  Closed curves
    repeat their first point at the end.
    """
    F = np.asarray(F, dtype=float)
    nx, ny = F.shape
    above = F > iso
    segments = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            code = (int(above[i, j]) | int(above[i + 1, j]) << 1
                    | int(above[i + 1, j + 1]) << 2 | int(above[i, j + 1]) << 3)
            if code in (5, 10):
                centre = 0.25 * (F[i, j] + F[i + 1, j] + F[i + 1, j + 1] + F[i, j + 1]) > iso
                above_pair = (0, 2) if code == 5 else (1, 3)
                below_pair = (1, 3) if code == 5 else (0, 2)
                # the centre's side stays connected; cut off the two opposite corners
                isolated = below_pair if centre else above_pair
                pairs = [_CORNER_EDGES[c] for c in isolated]
            else:
                pairs = _CASES[code]
            for e1, e2 in pairs:
                segments.append((_edge_point(e1, i, j, x, y, F, iso), _edge_point(e2, i, j, x, y, F, iso)))
    return _join(segments)


def _key(p):
    return (round(p[0], 12), round(p[1], 12))


def _join(segments) -> List[np.ndarray]:
    """Chain segments sharing endpoints into polylines."""
    adj = {}
    for k, (a, b) in enumerate(segments):
        adj.setdefault(_key(a), []).append(k)
        adj.setdefault(_key(b), []).append(k)
    used = [False] * len(segments)
    lines = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        a, b = segments[start]
        chain = [a, b]
        for forward in (True, False):
            while True:
                end = chain[-1] if forward else chain[0]
                nxt = next((k for k in adj.get(_key(end), []) if not used[k]), None)
                if nxt is None:
                    break
                used[nxt] = True
                p, q = segments[nxt]
                new = q if _key(p) == _key(end) else p
                if forward:
                    chain.append(new)
                else:
                    chain.insert(0, new)
        lines.append(np.array(chain))
    lines.sort(key=lambda c: (-len(c), c[0, 0], c[0, 1]))
    return lines


def contour_function(fn: Callable[[np.ndarray], np.ndarray], bbox, shape=(201, 201),
                     iso: float = 0.0, mask: Callable[[np.ndarray], np.ndarray] = None) -> List[np.ndarray]:
    """Sample ``fn`` on a uniform grid over ``bbox`` and extract its iso-lines.

    ``mask(points) -> bool`` marks the points that belong to the domain; iso-line
    pieces entering masked-out cells are dropped.
    """
    x0, x1, y0, y1 = bbox
    x = np.linspace(x0, x1, shape[0])
    y = np.linspace(y0, y1, shape[1])
    X, Y = np.meshgrid(x, y, indexing="ij")
    P = np.column_stack([X.ravel(), Y.ravel()])
    F = np.asarray(fn(P), dtype=float).reshape(X.shape)
    lines = marching_squares(x, y, F, iso)
    if mask is not None:
        kept = []
        for line in lines:
            inside = mask(line)
            # split at points outside the domain
            run = []
            for p, ok in zip(line, inside):
                if ok:
                    run.append(p)
                elif len(run) > 1:
                    kept.append(np.array(run))
                    run = []
                else:
                    run = []
            if len(run) > 1:
                kept.append(np.array(run))
        lines = kept
    return lines
