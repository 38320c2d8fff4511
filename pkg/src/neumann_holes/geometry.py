"""Boundary-conforming triangular meshes of rectangles and disks with one small hole.

The mesher samples the boundary curves exactly, seeds interior points from a
graded hexagonal lattice, relaxes them with a spring model and then runs a
Ruppert-style refinement loop on top of ``scipy.spatial.Delaunay``: free points
encroaching a boundary segment are removed, encroached segments are split at
the midpoint of the exact curve and poorly shaped or oversized triangles get a
circumcenter inserted.  Every boundary segment is therefore an edge of the
final Delaunay triangulation.
"""
from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from .errors import GeometryError, MeshError

# Outward normal of the perforated domain on the hole boundary points into the hole.
_DOMAIN_NORMAL_SIGN = -1.0


class Tag(IntEnum):
    OUTER = 0
    HOLE = 1


# ---------------------------------------------------------------------------
# shapes
# ---------------------------------------------------------------------------


def _as_points(p) -> np.ndarray:
    return np.atleast_2d(np.asarray(p, dtype=float))


def _march(curve_len: float, density, n_probe: int = 4096) -> np.ndarray:
    """Arclength positions (including 0, excluding curve_len) equidistributing ``density``."""
    s = np.linspace(0.0, curve_len, n_probe + 1)
    d = density(s)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(s))])
    n = max(1, int(math.ceil(cum[-1] - 1e-9)))
    targets = np.linspace(0.0, cum[-1], n + 1)[:-1]
    return np.interp(targets, cum, s)


@dataclass(frozen=True)
class Rectangle:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def validate(self) -> None:
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise GeometryError("rectangle must have positive side lengths")

    @property
    def feature_size(self) -> float:
        return min(self.x_max - self.x_min, self.y_max - self.y_min)

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def bbox(self):
        return self.x_min, self.x_max, self.y_min, self.y_max

    def distance_inside(self, p) -> np.ndarray:
        p = _as_points(p)
        return np.minimum.reduce(
            [p[:, 0] - self.x_min, self.x_max - p[:, 0], p[:, 1] - self.y_min, self.y_max - p[:, 1]]
        )

    def contains(self, p) -> np.ndarray:
        return self.distance_inside(p) > 0

    def project(self, p) -> np.ndarray:
        return _as_points(p).copy()

    def sample_boundary(self, size_fn) -> np.ndarray:
        corners = np.array(
            [
                [self.x_min, self.y_min],
                [self.x_max, self.y_min],
                [self.x_max, self.y_max],
                [self.x_min, self.y_max],
            ]
        )
        out = []
        for a, b in zip(corners, np.roll(corners, -1, axis=0)):
            length = float(np.hypot(*(b - a)))
            t = (b - a) / length
            s = _march(length, lambda s: 1.0 / size_fn(a + s[:, None] * t))
            out.append(a + s[:, None] * t)
        return np.vstack(out)

    def to_dict(self) -> dict:
        return {"type": "rectangle", "x_min": self.x_min, "x_max": self.x_max,
                "y_min": self.y_min, "y_max": self.y_max}


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def validate(self) -> None:
        if not self.radius > 0:
            raise GeometryError("disk must have positive radius")

    @property
    def feature_size(self) -> float:
        return self.radius

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    @property
    def bbox(self):
        cx, cy = self.center
        r = self.radius
        return cx - r, cx + r, cy - r, cy + r

    def distance_inside(self, p) -> np.ndarray:
        p = _as_points(p)
        return self.radius - np.hypot(p[:, 0] - self.center[0], p[:, 1] - self.center[1])

    def contains(self, p) -> np.ndarray:
        return self.distance_inside(p) > 0

    def project(self, p) -> np.ndarray:
        p = _as_points(p)
        c = np.asarray(self.center, dtype=float)
        d = p - c
        return c + self.radius * d / np.hypot(d[:, 0], d[:, 1])[:, None]

    def sample_boundary(self, size_fn) -> np.ndarray:
        c = np.asarray(self.center, dtype=float)
        length = 2 * math.pi * self.radius

        def pts(s):
            th = s / self.radius
            return c + self.radius * np.column_stack([np.cos(th), np.sin(th)])

        s = _march(length, lambda s: 1.0 / size_fn(pts(s)))
        if len(s) < 16:
            s = np.linspace(0, length, 17)[:-1]
        return pts(s)

    def to_dict(self) -> dict:
        return {"type": "disk", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Circle:
    """Reference hole shape: the open unit disk."""

    def to_dict(self) -> dict:
        return {"type": "circle"}


@dataclass(frozen=True)
class Polygon:
    """Reference hole shape given by a simple counterclockwise polygon."""

    vertices: tuple

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": [list(v) for v in self.vertices]}


OuterShape = Union[Rectangle, Disk]
HoleShape = Union[Circle, Polygon]


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def points_in_polygon(points, poly: np.ndarray, chunk: int = 20000) -> np.ndarray:
    """Even-odd ray casting, vectorized over points."""
    points = _as_points(points)
    out = np.zeros(len(points), dtype=bool)
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    for start in range(0, len(points), chunk):
        px = points[start:start + chunk, 0][:, None]
        py = points[start:start + chunk, 1][:, None]
        cond = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        out[start:start + chunk] = np.sum(cond & (px < xc), axis=1) % 2 == 1
    return out


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point in ``p`` to the closest of the segments ``a[i]-b[i]``."""
    best = np.full(len(p), np.inf)
    for ai, bi in zip(a, b):
        d = bi - ai
        t = np.clip(((p - ai) @ d) / (d @ d), 0.0, 1.0)
        q = ai + t[:, None] * d
        best = np.minimum(best, np.hypot(p[:, 0] - q[:, 0], p[:, 1] - q[:, 1]))
    return best


@dataclass(frozen=True)
class HoleSpec:
    shape: HoleShape
    center: tuple
    eps: float

    def _poly(self) -> np.ndarray:
        return np.asarray(self.center, float) + self.eps * np.asarray(self.shape.vertices, float)

    def validate(self) -> None:
        if not self.eps > 0:
            raise GeometryError("hole scale eps must be positive")
        if isinstance(self.shape, Polygon):
            v = np.asarray(self.shape.vertices, dtype=float)
            if v.ndim != 2 or len(v) < 3:
                raise GeometryError("polygon needs at least 3 vertices")
            if _signed_area(v) <= 0:
                raise GeometryError("polygon must be positively oriented")
            n = len(v)
            for i in range(n):
                for j in range(i + 1, n):
                    if j == i + 1 or (i == 0 and j == n - 1):
                        continue
                    if _segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                        raise GeometryError("polygon is not simple")
        elif not isinstance(self.shape, Circle):
            raise GeometryError(f"unsupported hole shape {self.shape!r}")

    @property
    def radius_bound(self) -> float:
        """Radius of the smallest ball around ``center`` containing the hole."""
        if isinstance(self.shape, Circle):
            return self.eps
        return self.eps * float(np.max(np.hypot(*np.asarray(self.shape.vertices, float).T)))

    @property
    def perimeter(self) -> float:
        if isinstance(self.shape, Circle):
            return 2 * math.pi * self.eps
        v = self._poly()
        return float(np.sum(np.hypot(*(np.roll(v, -1, axis=0) - v).T)))

    @property
    def area(self) -> float:
        if isinstance(self.shape, Circle):
            return math.pi * self.eps**2
        return _signed_area(self._poly())

    def sample(self, n: int) -> np.ndarray:
        """``n`` counterclockwise points on the exact hole boundary (polygon corners kept)."""
        c = np.asarray(self.center, dtype=float)
        if isinstance(self.shape, Circle):
            th = 2 * math.pi * np.arange(n) / n
            return c + self.eps * np.column_stack([np.cos(th), np.sin(th)])
        v = self._poly()
        lens = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
        counts = np.maximum(1, np.round(n * lens / lens.sum()).astype(int))
        while counts.sum() < n:
            counts[np.argmax(lens / counts)] += 1
        pts = []
        for a, b, m in zip(v, np.roll(v, -1, axis=0), counts):
            t = np.arange(m) / m
            pts.append(a + t[:, None] * (b - a))
        return np.vstack(pts)

    def project(self, p) -> np.ndarray:
        p = _as_points(p)
        if isinstance(self.shape, Circle):
            c = np.asarray(self.center, dtype=float)
            d = p - c
            return c + self.eps * d / np.hypot(d[:, 0], d[:, 1])[:, None]
        return p.copy()

    def distance(self, p) -> np.ndarray:
        """Unsigned distance to the exact hole boundary."""
        p = _as_points(p)
        if isinstance(self.shape, Circle):
            return np.abs(np.hypot(p[:, 0] - self.center[0], p[:, 1] - self.center[1]) - self.eps)
        v = self._poly()
        return _point_segment_distance(p, v, np.roll(v, -1, axis=0))

    def contains(self, p) -> np.ndarray:
        p = _as_points(p)
        if isinstance(self.shape, Circle):
            return np.hypot(p[:, 0] - self.center[0], p[:, 1] - self.center[1]) < self.eps
        return points_in_polygon(p, self._poly())

    def outward_normal(self, p) -> np.ndarray:
        """Exact unit normal of the hole shape pointing away from the hole."""
        p = _as_points(p)
        if isinstance(self.shape, Circle):
            d = p - np.asarray(self.center, dtype=float)
            return d / np.hypot(d[:, 0], d[:, 1])[:, None]
        v = self._poly()
        w = np.roll(v, -1, axis=0)
        dist = np.stack([_point_segment_distance(p, v[i:i + 1], w[i:i + 1]) for i in range(len(v))])
        side = np.argmin(dist, axis=0)
        t = w[side] - v[side]
        t /= np.hypot(t[:, 0], t[:, 1])[:, None]
        return np.column_stack([t[:, 1], -t[:, 0]])

    def domain_normal(self, p) -> np.ndarray:
        """Outer unit normal of the perforated domain on the hole boundary (into the hole)."""
        return _DOMAIN_NORMAL_SIGN * self.outward_normal(p)

    def to_dict(self) -> dict:
        return {"shape": self.shape.to_dict(), "center": list(self.center), "eps": self.eps}


@dataclass(frozen=True)
class DomainSpec:
    outer: OuterShape
    hole: Optional[HoleSpec] = None

    def validate(self) -> None:
        self.outer.validate()
        if self.hole is None:
            return
        self.hole.validate()
        clearance = float(self.outer.distance_inside(self.hole.center)[0])
        if clearance < 3 * self.hole.radius_bound:
            raise GeometryError(
                "hole must stay at least one diameter away from the outer boundary "
                f"(clearance {clearance:.4g}, hole radius {self.hole.radius_bound:.4g})"
            )

    @property
    def area(self) -> float:
        return self.outer.area - (self.hole.area if self.hole is not None else 0.0)

    def with_hole(self, hole: Optional[HoleSpec]) -> "DomainSpec":
        return DomainSpec(self.outer, hole)

    def to_dict(self) -> dict:
        return {"outer": self.outer.to_dict(),
                "hole": self.hole.to_dict() if self.hole is not None else None}

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        o = d["outer"]
        if o["type"] == "rectangle":
            outer = Rectangle(o["x_min"], o["x_max"], o["y_min"], o["y_max"])
        elif o["type"] == "disk":
            outer = Disk(tuple(o["center"]), o["radius"])
        else:
            raise GeometryError(f"unknown outer shape {o['type']!r}")
        hole = None
        if d.get("hole"):
            hd = d["hole"]
            s = hd["shape"]
            if s["type"] == "circle":
                shape = Circle()
            elif s["type"] == "polygon":
                shape = Polygon(tuple(tuple(v) for v in s["vertices"]))
            else:
                raise GeometryError(f"unknown hole shape {s['type']!r}")
            hole = HoleSpec(shape, tuple(hd["center"]), hd["eps"])
        return cls(outer, hole)


# ---------------------------------------------------------------------------
# mesh container
# ---------------------------------------------------------------------------


def unique_edges(triangles: np.ndarray):
    """Return ``(edges, tri_edges)``; local edge ``i`` of a triangle joins vertices ``i`` and ``i+1``."""
    t = np.asarray(triangles)
    all_e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    all_e.sort(axis=1)
    edges, inv = np.unique(all_e, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    tri_edges = inv.reshape(3, -1).T.copy()
    return edges, tri_edges


def _edge_lookup(edges: np.ndarray, queries: np.ndarray, n_vertices: int) -> np.ndarray:
    """Index of each (unordered) query edge in the sorted ``edges`` array, -1 if absent."""
    key = edges[:, 0].astype(np.int64) * n_vertices + edges[:, 1]
    q = np.sort(np.asarray(queries, dtype=np.int64), axis=1)
    qk = q[:, 0] * n_vertices + q[:, 1]
    pos = np.searchsorted(key, qk)
    pos = np.clip(pos, 0, len(key) - 1)
    return np.where(key[pos] == qk, pos, -1)


def triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a, b, c = (vertices[triangles[:, i]] for i in range(3))
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def triangle_angles(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Interior angles in degrees, shape (m, 3); angle ``i`` sits at vertex ``i``."""
    p = [vertices[triangles[:, i]] for i in range(3)]
    out = np.empty((len(triangles), 3))
    for i in range(3):
        u = p[(i + 1) % 3] - p[i]
        v = p[(i + 2) % 3] - p[i]
        cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
        dot = np.einsum("ij,ij->i", u, v)
        out[:, i] = np.degrees(np.arctan2(np.abs(cross), dot))
    return out


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangulation with tagged boundary edges.

    ``regions`` is only set for meshes of the full outer domain in which the hole
    interior is meshed too (``fill_hole=True``); region 0 is the perforated domain
    and region 1 the hole.  In that case the Hole-tagged edges are interface edges.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    h_target: float
    spec: Optional[DomainSpec] = None
    regions: Optional[np.ndarray] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        conv = {
            "vertices": (self.vertices, np.float64, (-1, 2)),
            "triangles": (self.triangles, np.int64, (-1, 3)),
            "boundary_edges": (self.boundary_edges, np.int64, (-1, 2)),
            "boundary_tags": (self.boundary_tags, np.int8, (-1,)),
        }
        for name, (arr, dt, shape) in conv.items():
            a = np.array(arr, dtype=dt).reshape(shape)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.regions is not None:
            r = np.array(self.regions, dtype=np.int8).reshape(-1)
            r.setflags(write=False)
            object.__setattr__(self, "regions", r)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def has_hole(self) -> bool:
        return bool(np.any(self.boundary_tags == Tag.HOLE))

    @property
    def is_filled(self) -> bool:
        return self.regions is not None

    def edges(self):
        if "edges" not in self._cache:
            self._cache["edges"] = unique_edges(self.triangles)
        return self._cache["edges"]

    def areas(self) -> np.ndarray:
        return triangle_areas(self.vertices, self.triangles)

    def area(self) -> float:
        return float(self.areas().sum())

    def tagged_edges(self, tag: Tag) -> np.ndarray:
        return self.boundary_edges[self.boundary_tags == tag]

    def boundary_length(self, tag: Tag) -> float:
        e = self.tagged_edges(tag)
        d = self.vertices[e[:, 1]] - self.vertices[e[:, 0]]
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    def submesh(self, region: int = 0) -> "Mesh":
        """Extract one region of a filled mesh, renumbering vertices."""
        if self.regions is None:
            raise MeshError("submesh requires a mesh built with fill_hole=True")
        tris = self.triangles[self.regions == region]
        used = np.unique(tris)
        remap = -np.ones(self.n_vertices, dtype=np.int64)
        remap[used] = np.arange(len(used))
        keep = np.all(remap[self.boundary_edges] >= 0, axis=1)
        if region == 1:
            keep &= self.boundary_tags == Tag.HOLE
        spec = self.spec
        if spec is not None and region == 1:
            spec = None
        return Mesh(
            self.vertices[used],
            remap[tris],
            remap[self.boundary_edges[keep]],
            self.boundary_tags[keep],
            self.h_target,
            spec,
            None,
        )


# ---------------------------------------------------------------------------
# size field and generation
# ---------------------------------------------------------------------------


# seed spacing relative to the size field; relaxed edges then sit at or just below h
_LATTICE_FACTOR = 0.9


class _SizeField:
    def __init__(self, h: float, hole: Optional[HoleSpec], h_hole: float, grading: float):
        self.h = h
        self.hole = hole
        self.h_hole = h_hole
        self.grading = grading

    def __call__(self, p) -> np.ndarray:
        p = _as_points(p)
        if self.hole is None:
            return np.full(len(p), self.h)
        return np.minimum(self.h, self.h_hole + self.grading * self.hole.distance(p))

    @property
    def graded_radius(self) -> float:
        if self.hole is None:
            return 0.0
        return self.hole.radius_bound + max(self.h - self.h_hole, 0.0) / self.grading


def _hex_lattice(x0, x1, y0, y1, s):
    dy = s * math.sqrt(3) / 2
    ys = np.arange(y0, y1 + dy, dy)
    xs = np.arange(x0, x1 + s, s)
    X, Y = np.meshgrid(xs, ys)
    X = X + (np.arange(len(ys))[:, None] % 2) * (s / 2)
    return np.column_stack([X.ravel(), Y.ravel()])


class _Builder:
    """Mutable state of one mesh generation run."""

    def __init__(self, spec: DomainSpec, h: float, seed: int, fill_hole: bool,
                 min_angle: float, grading: float):
        self.spec = spec
        self.h = h
        self.fill = fill_hole and spec.hole is not None
        self.min_angle = min_angle
        self.rng = np.random.default_rng(seed)
        hole = spec.hole
        if hole is not None:
            self.n_hole = max(32, int(math.ceil(hole.perimeter / h)))
            h_hole = hole.perimeter / self.n_hole
        else:
            self.n_hole = 0
            h_hole = h
        self.size = _SizeField(h, hole, h_hole, grading)
        self.h_min = min(h, h_hole)

        outer_pts = spec.outer.sample_boundary(self.size)
        pts = [outer_pts]
        self.loops = {Tag.OUTER: list(range(len(outer_pts)))}
        if hole is not None:
            hp = hole.sample(self.n_hole)
            self.loops[Tag.HOLE] = list(range(len(outer_pts), len(outer_pts) + len(hp)))
            pts.append(hp)
        self.P = np.vstack(pts)
        self.fixed = np.ones(len(self.P), dtype=bool)

    # -- geometry helpers -------------------------------------------------
    def boundary_distance(self, p) -> np.ndarray:
        d = self.spec.outer.distance_inside(p)
        if self.spec.hole is not None:
            d = np.minimum(d, self.spec.hole.distance(p))
        return d

    def admissible(self, p) -> np.ndarray:
        ok = self.spec.outer.contains(p)
        if self.spec.hole is not None and not self.fill:
            ok &= ~self.spec.hole.contains(p)
        return ok

    def segments(self):
        segs, tags = [], []
        for tag, loop in self.loops.items():
            a = np.asarray(loop)
            segs.append(np.column_stack([a, np.roll(a, -1)]))
            tags.append(np.full(len(a), int(tag)))
        return np.vstack(segs), np.concatenate(tags)

    def hole_polygon(self) -> Optional[np.ndarray]:
        if Tag.HOLE not in self.loops:
            return None
        return self.P[self.loops[Tag.HOLE]]

    # -- stages -----------------------------------------------------------
    def seed(self):
        x0, x1, y0, y1 = self.spec.outer.bbox
        coarse = _hex_lattice(x0, x1, y0, y1, _LATTICE_FACTOR * self.h)
        coarse = coarse[self.size(coarse) >= self.h * (1 - 1e-12)]
        free = [coarse]
        if self.spec.hole is not None and self.size.h_hole < self.h:
            cx, cy = self.spec.hole.center
            r = self.size.graded_radius
            fine = _hex_lattice(max(x0, cx - r), min(x1, cx + r), max(y0, cy - r), min(y1, cy + r),
                                _LATTICE_FACTOR * self.size.h_hole)
            s = self.size(fine)
            fine = fine[s < self.h * (1 - 1e-12)]
            keep = self.rng.random(len(fine)) < (self.size.h_hole / self.size(fine)) ** 2
            free.append(fine[keep])
        F = np.vstack(free)
        F = F[self.admissible(F)]
        F = F[self.boundary_distance(F) > 0.6 * self.size(F)]
        self.P = np.vstack([self.P, F])
        self.fixed = np.concatenate([self.fixed, np.zeros(len(F), dtype=bool)])

    def triangulate(self):
        P = self.P
        tri = Delaunay(P).simplices.astype(np.int64)
        area = triangle_areas(P, tri)
        neg = area < 0
        tri[neg] = tri[neg][:, [0, 2, 1]]
        area = np.abs(area)
        tri = tri[area > 1e-10 * self.h_min**2]
        cent = P[tri].mean(axis=1)
        tri = tri[self.spec.outer.contains(cent)]
        cent = P[tri].mean(axis=1)
        poly = self.hole_polygon()
        if poly is not None:
            region = points_in_polygon(cent, poly).astype(np.int8)
        else:
            region = np.zeros(len(tri), dtype=np.int8)
        if not self.fill:
            tri = tri[region == 0]
            region = region[region == 0]
        return tri, region

    def relax(self, iters: int = 40, fscale: float = 1.2, dt: float = 0.2):
        for _ in range(iters):
            free = ~self.fixed
            if not free.any():
                return
            tri, _ = self.triangulate()
            bars, _ = unique_edges(tri)
            vec = self.P[bars[:, 0]] - self.P[bars[:, 1]]
            L = np.hypot(vec[:, 0], vec[:, 1])
            hb = self.size(0.5 * (self.P[bars[:, 0]] + self.P[bars[:, 1]]))
            L0 = hb * fscale * math.sqrt(np.sum(L**2) / np.sum(hb**2))
            Fm = np.maximum(L0 - L, 0.0)
            Fv = (Fm / L)[:, None] * vec
            n = len(self.P)
            Ft = np.zeros((n, 2))
            for k in range(2):
                Ft[:, k] = np.bincount(bars[:, 0], Fv[:, k], n) - np.bincount(bars[:, 1], Fv[:, k], n)
            Ft[self.fixed] = 0.0
            new = self.P + dt * Ft
            moved = free & np.any(Ft != 0, axis=1)
            idx = np.nonzero(moved)[0]
            cand = new[idx]
            ok = self.admissible(cand) & (self.boundary_distance(cand) > 0.35 * self.size(cand))
            self.P[idx[ok]] = cand[ok]

    def _delete_free(self, mask: np.ndarray):
        if not mask.any():
            return
        assert not np.any(mask & self.fixed)
        keep = ~mask
        remap = -np.ones(len(self.P), dtype=np.int64)
        remap[keep] = np.arange(keep.sum())
        self.P = self.P[keep]
        self.fixed = self.fixed[keep]
        for tag in self.loops:
            self.loops[tag] = [int(remap[i]) for i in self.loops[tag]]

    def _encroached(self, pts: np.ndarray, segs: np.ndarray):
        """For each point, the index of one segment whose diametral circle contains it (-1 if none)."""
        a = self.P[segs[:, 0]]
        b = self.P[segs[:, 1]]
        mid = 0.5 * (a + b)
        rad = 0.5 * np.hypot(*(b - a).T)
        tree = cKDTree(mid)
        hits = tree.query_ball_point(pts, r=float(rad.max()) * (1 + 1e-12))
        out = -np.ones(len(pts), dtype=np.int64)
        for i, cand in enumerate(hits):
            if not cand:
                continue
            cand = np.asarray(cand)
            d = np.hypot(*(pts[i] - mid[cand]).T)
            inside = cand[d < rad[cand] * (1 - 1e-9)]
            if len(inside):
                out[i] = inside[np.argmin(d[np.isin(cand, inside)])]
        return out

    def _split_segment(self, seg_index: int, segs: np.ndarray, tags: np.ndarray) -> bool:
        i, j = segs[seg_index]
        tag = Tag(int(tags[seg_index]))
        a, b = self.P[i], self.P[j]
        seg_len = float(np.hypot(*(b - a)))
        if seg_len < 0.2 * self.size.h_hole:
            return False
        mid = 0.5 * (a + b)
        curve = self.spec.outer if tag == Tag.OUTER else self.spec.hole
        m = curve.project(mid)[0]
        loop = self.loops[tag]
        pos = loop.index(int(i))
        nxt = loop[(pos + 1) % len(loop)]
        if nxt != j:
            raise MeshError("segment bookkeeping inconsistent")
        self.P = np.vstack([self.P, m])
        self.fixed = np.append(self.fixed, True)
        loop.insert(pos + 1, len(self.P) - 1)
        return True

    def refine(self, max_rounds: int = 80):
        for _ in range(max_rounds):
            segs, tags = self.segments()
            # free points inside diametral circles are removed, not fought with
            free_idx = np.nonzero(~self.fixed)[0]
            if len(free_idx):
                enc = self._encroached(self.P[free_idx], segs)
                mask = np.zeros(len(self.P), dtype=bool)
                mask[free_idx[enc >= 0]] = True
                self._delete_free(mask)
                segs, tags = self.segments()
            tri, region = self.triangulate()
            edges, _ = unique_edges(tri)
            missing = np.nonzero(_edge_lookup(edges, segs, len(self.P)) < 0)[0]
            if len(missing):
                changed = False
                for s in sorted(missing, reverse=True):
                    changed |= self._split_segment(int(s), segs, tags)
                    segs, tags = self.segments()
                if not changed:
                    raise MeshError("boundary segment cannot be recovered")
                continue
            ang = triangle_angles(self.P, tri).min(axis=1)
            a, b, c = (self.P[tri[:, k]] for k in range(3))
            longest = np.max(np.stack([np.hypot(*(b - a).T), np.hypot(*(c - b).T),
                                       np.hypot(*(a - c).T)]), axis=0)
            cent = (a + b + c) / 3
            big = longest > 1.7 * self.size(cent)
            bad = np.nonzero((ang < self.min_angle) | big)[0]
            if len(bad) == 0:
                return tri, region
            bad = bad[np.argsort(ang[bad], kind="stable")]
            cc = _circumcenters(self.P, tri[bad])
            enc = self._encroached(cc, segs)
            split = sorted(set(int(s) for s in enc[enc >= 0]), reverse=True)
            ins = cc[enc < 0]
            if len(ins):
                ins = ins[self.admissible(ins)]
            if len(ins):
                # greedy thinning so one round never inserts two nearby points
                keep = []
                tree_pts = []
                sz = self.size(ins)
                for k, p in enumerate(ins):
                    if tree_pts and np.min(np.hypot(*(np.asarray(tree_pts) - p).T)) < 0.5 * sz[k]:
                        continue
                    tree_pts.append(p)
                    keep.append(k)
                ins = ins[keep]
                existing = cKDTree(self.P)
                dist, _ = existing.query(ins)
                ins = ins[dist > 0.2 * self.size(ins)]
            changed = False
            for s in split:
                changed |= self._split_segment(s, segs, tags)
            if len(ins):
                self.P = np.vstack([self.P, ins])
                self.fixed = np.concatenate([self.fixed, np.zeros(len(ins), dtype=bool)])
                changed = True
            if not changed:
                break
        tri, region = self.triangulate()
        if triangle_angles(self.P, tri).min() < 20.0:
            raise MeshError("quality target unreachable within the refinement budget")
        return tri, region

    def build(self) -> Mesh:
        self.seed()
        self.relax()
        tri, region = self.refine()
        used = np.unique(tri)
        fixed_idx = np.nonzero(self.fixed)[0]
        used = np.union1d(used, fixed_idx) if self.fill else used
        remap = -np.ones(len(self.P), dtype=np.int64)
        remap[used] = np.arange(len(used))
        segs, tags = self.segments()
        return Mesh(
            self.P[used],
            remap[tri],
            remap[segs],
            tags,
            self.h,
            self.spec,
            region if self.fill else None,
        )


def _circumcenters(P: np.ndarray, tri: np.ndarray) -> np.ndarray:
    a, b, c = (P[tri[:, k]] for k in range(3))
    bx, by = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    cx, cy = c[:, 0] - a[:, 0], c[:, 1] - a[:, 1]
    d = 2 * (bx * cy - by * cx)
    b2, c2 = bx**2 + by**2, cx**2 + cy**2
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return a + np.column_stack([ux, uy])


def generate_mesh(spec: DomainSpec, h: float, *, seed: int = 0, fill_hole: bool = False,
                  min_angle: float = 25.0, grading: float = 0.25) -> Mesh:
    """Mesh the perforated domain (or, with ``fill_hole``, the whole outer shape).

    The hole boundary is resolved by ``max(32, ceil(perimeter / h))`` segments
    and element sizes grow linearly away from it with slope ``grading``.
    """
    spec.validate()
    if not (h > 0 and h <= spec.outer.feature_size / 4 * (1 + 1e-12)):
        raise GeometryError(f"h={h} must lie in (0, feature_size/4 = {spec.outer.feature_size / 4}]")
    builder = _Builder(spec, h, seed, fill_hole, min_angle, grading)
    mesh = builder.build()
    problems = mesh_problems(mesh)
    if problems:
        raise MeshError("; ".join(problems))
    return mesh


# ---------------------------------------------------------------------------
# refinement, quality, validation
# ---------------------------------------------------------------------------


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split every triangle into four; boundary midpoints are snapped to the exact curves."""
    V = mesh.vertices
    T = mesh.triangles
    edges, tri_edges = mesh.edges()
    nv = len(V)
    mid = 0.5 * (V[edges[:, 0]] + V[edges[:, 1]])
    bidx = _edge_lookup(edges, mesh.boundary_edges, nv)
    if np.any(bidx < 0):
        raise MeshError("boundary edge not found in triangulation")
    if mesh.spec is not None:
        for tag, curve in ((Tag.OUTER, mesh.spec.outer), (Tag.HOLE, mesh.spec.hole)):
            sel = bidx[mesh.boundary_tags == tag]
            if len(sel) and curve is not None:
                mid[sel] = curve.project(mid[sel])
    newV = np.vstack([V, mid])
    m = nv + tri_edges  # midpoint ids of edges (v0v1, v1v2, v2v0)
    a, b, c = T[:, 0], T[:, 1], T[:, 2]
    m01, m12, m20 = m[:, 0], m[:, 1], m[:, 2]
    newT = np.concatenate([
        np.column_stack([a, m01, m20]),
        np.column_stack([m01, b, m12]),
        np.column_stack([m20, m12, c]),
        np.column_stack([m01, m12, m20]),
    ])
    # keep children of one parent adjacent in memory: reorder as parent-major
    newT = newT.reshape(4, -1, 3).transpose(1, 0, 2).reshape(-1, 3)
    be = mesh.boundary_edges
    bm = nv + bidx
    newB = np.stack([np.column_stack([be[:, 0], bm]), np.column_stack([bm, be[:, 1]])], axis=1).reshape(-1, 2)
    newTags = np.repeat(mesh.boundary_tags, 2)
    regions = None if mesh.regions is None else np.repeat(mesh.regions, 4)
    out = Mesh(newV, newT, newB, newTags, mesh.h_target / 2, mesh.spec, regions)
    if np.any(out.areas() <= 0):
        raise MeshError("snapping produced an inverted triangle")
    return out


@dataclass(frozen=True)
class QualityReport:
    min_angle: float
    max_angle: float
    max_aspect: float
    h_min: float
    h_max: float
    n_vertices: int
    n_triangles: int
    n_boundary_edges: int
    max_neighbor_ratio: float


def mesh_quality(mesh: Mesh) -> QualityReport:
    V, T = mesh.vertices, mesh.triangles
    ang = triangle_angles(V, T)
    a, b, c = (V[T[:, k]] for k in range(3))
    la = np.hypot(*(b - c).T)
    lb = np.hypot(*(c - a).T)
    lc = np.hypot(*(a - b).T)
    area = np.abs(triangle_areas(V, T))
    s = 0.5 * (la + lb + lc)
    inradius = area / s
    circumradius = la * lb * lc / (4 * area)
    aspect = circumradius / (2 * inradius)
    edges, tri_edges = mesh.edges()
    elen = np.hypot(*(V[edges[:, 1]] - V[edges[:, 0]]).T)
    longest = np.maximum(np.maximum(la, lb), lc)
    # neighbour size ratio through interior edges
    owners = np.full((len(edges), 2), -1, dtype=np.int64)
    flat = tri_edges.reshape(-1)
    tri_id = np.repeat(np.arange(len(T)), 3)
    order = np.argsort(flat, kind="stable")
    fe, ft = flat[order], tri_id[order]
    first = np.ones(len(fe), dtype=bool)
    first[1:] = fe[1:] != fe[:-1]
    owners[fe[first], 0] = ft[first]
    owners[fe[~first], 1] = ft[~first]
    inner = owners[:, 1] >= 0
    r = longest[owners[inner, 0]] / longest[owners[inner, 1]]
    ratio = float(np.max(np.maximum(r, 1 / r))) if inner.any() else 1.0
    return QualityReport(
        min_angle=float(ang.min()),
        max_angle=float(ang.max()),
        max_aspect=float(aspect.max()),
        h_min=float(elen.min()),
        h_max=float(elen.max()),
        n_vertices=mesh.n_vertices,
        n_triangles=mesh.n_triangles,
        n_boundary_edges=len(mesh.boundary_edges),
        max_neighbor_ratio=ratio,
    )


def mesh_problems(mesh: Mesh, min_angle: float = 20.0) -> list:
    """List of violated mesh invariants (empty when the mesh is valid)."""
    problems = []
    V, T = mesh.vertices, mesh.triangles
    if len(T) == 0:
        return ["mesh has no triangles"]
    if np.any(mesh.areas() <= 0):
        problems.append("non-positive triangle area")
    edges, tri_edges = mesh.edges()
    count = np.bincount(tri_edges.reshape(-1), minlength=len(edges))
    if np.any(count > 2):
        problems.append("edge shared by more than two triangles")
    bidx = _edge_lookup(edges, mesh.boundary_edges, len(V))
    if np.any(bidx < 0):
        problems.append("tagged edge missing from the triangulation")
        return problems
    if len(np.unique(bidx)) != len(bidx):
        problems.append("edge carries more than one tag")
    is_tagged = np.zeros(len(edges), dtype=bool)
    is_tagged[bidx] = True
    if mesh.regions is None:
        if np.any(count[bidx] != 1):
            problems.append("boundary edge not on the boundary")
        if np.any((count == 1) & ~is_tagged):
            problems.append("untagged boundary edge")
    else:
        outer = bidx[mesh.boundary_tags == Tag.OUTER]
        if np.any(count[outer] != 1):
            problems.append("outer edge not on the boundary")
        if np.any((count == 1) & ~is_tagged):
            problems.append("untagged boundary edge")
    if mesh.spec is not None and mesh.spec.hole is not None and mesh.has_hole:
        he = mesh.tagged_edges(Tag.HOLE)
        pts = V[np.unique(he)]
        if np.max(mesh.spec.hole.distance(pts)) > 1e-12 * max(mesh.h_target, 1.0):
            problems.append("hole vertex off the exact boundary")
    if triangle_angles(V, T).min() < min_angle:
        problems.append(f"minimum angle below {min_angle} degrees")
    return problems


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def write_mesh(mesh: Mesh, target) -> None:
    """Plain-text mesh: VERTICES / TRIANGLES / BOUNDARY sections, shortest round-trip floats."""
    own = isinstance(target, (str, os.PathLike))
    fh = open(target, "w", encoding="utf-8") if own else target
    try:
        fh.write("# neumann_holes mesh\n")
        fh.write(f"H_TARGET {float(mesh.h_target)!r}\n")
        if mesh.spec is not None:
            fh.write("DOMAIN " + json.dumps(mesh.spec.to_dict(), sort_keys=True) + "\n")
        fh.write(f"VERTICES {mesh.n_vertices}\n")
        for i, (x, y) in enumerate(mesh.vertices):
            fh.write(f"{i} {float(x)!r} {float(y)!r}\n")
        fh.write(f"TRIANGLES {mesh.n_triangles}\n")
        for k, (i, j, l) in enumerate(mesh.triangles):
            if mesh.regions is None:
                fh.write(f"{i} {j} {l}\n")
            else:
                fh.write(f"{i} {j} {l} {int(mesh.regions[k])}\n")
        fh.write(f"BOUNDARY {len(mesh.boundary_edges)}\n")
        for (i, j), t in zip(mesh.boundary_edges, mesh.boundary_tags):
            fh.write(f"{i} {j} {Tag(int(t)).name}\n")
    finally:
        if own:
            fh.close()


def mesh_to_string(mesh: Mesh) -> str:
    buf = io.StringIO()
    write_mesh(mesh, buf)
    return buf.getvalue()


def read_mesh(source) -> Mesh:
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = str(source).splitlines()
    it = iter(lines)
    h = 0.0
    spec = None
    V, T, R, B, G = [], [], [], [], []
    for line in it:
        if not line.strip() or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if head == "H_TARGET":
            h = float(rest)
        elif head == "DOMAIN":
            spec = DomainSpec.from_dict(json.loads(rest))
        elif head == "VERTICES":
            for _ in range(int(rest)):
                _, x, y = next(it).split()
                V.append((float(x), float(y)))
        elif head == "TRIANGLES":
            for _ in range(int(rest)):
                parts = next(it).split()
                T.append(tuple(int(v) for v in parts[:3]))
                if len(parts) > 3:
                    R.append(int(parts[3]))
        elif head == "BOUNDARY":
            for _ in range(int(rest)):
                i, j, tag = next(it).split()
                B.append((int(i), int(j)))
                G.append(int(Tag[tag]))
        else:
            raise MeshError(f"unknown mesh section {head!r}")
    return Mesh(np.array(V), np.array(T), np.array(B), np.array(G), h, spec,
                np.array(R) if R else None)


def rectangle(x_min: float, x_max: float, y_min: float, y_max: float) -> Rectangle:
    return Rectangle(float(x_min), float(x_max), float(y_min), float(y_max))


def circle_hole(center: Sequence[float], eps: float) -> HoleSpec:
    return HoleSpec(Circle(), (float(center[0]), float(center[1])), float(eps))
