"""P1/P2 Lagrange finite elements: stiffness, mass and hole-boundary loads."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import NoHoleError
from .geometry import Mesh, Tag, _edge_lookup

# (points in reference coordinates, weights summing to the reference area 1/2)
_QUAD_P1 = (
    np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]]),
    np.full(3, 1 / 6),
)


def _strang_fix_7():
    s15 = math.sqrt(15.0)
    a, b = (6 - s15) / 21, (9 + 2 * s15) / 21
    c, d = (6 + s15) / 21, (9 - 2 * s15) / 21
    pts = np.array([[1 / 3, 1 / 3], [a, a], [b, a], [a, b], [c, c], [d, c], [c, d]])
    wa, wc = (155 - s15) / 1200, (155 + s15) / 1200
    w = np.array([9 / 40, wa, wa, wa, wc, wc, wc]) / 2
    return pts, w


_QUAD_P2 = _strang_fix_7()
_GAUSS4 = np.polynomial.legendre.leggauss(4)


def _basis(order: int, xi: np.ndarray):
    """Reference basis values (q, nb) and gradients (q, nb, 2) at points ``xi``."""
    x, y = xi[:, 0], xi[:, 1]
    L = np.stack([1 - x - y, x, y], axis=1)
    dL = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    if order == 1:
        return L, np.broadcast_to(dL, (len(xi), 3, 2)).copy()
    # vertices 0..2, then midpoints of local edges (0,1), (1,2), (2,0)
    pairs = ((0, 1), (1, 2), (2, 0))
    vals = np.empty((len(xi), 6))
    grads = np.empty((len(xi), 6, 2))
    for i in range(3):
        vals[:, i] = L[:, i] * (2 * L[:, i] - 1)
        grads[:, i] = (4 * L[:, i] - 1)[:, None] * dL[i]
    for k, (i, j) in enumerate(pairs):
        vals[:, 3 + k] = 4 * L[:, i] * L[:, j]
        grads[:, 3 + k] = 4 * (L[:, j][:, None] * dL[i] + L[:, i][:, None] * dL[j])
    return vals, grads


class FemSpace:
    """Lagrange space of order 1 or 2 over a mesh.

    P2 degrees of freedom are the vertices followed by one per edge (edge
    midpoints of the straight-sided triangles).
    """

    def __init__(self, mesh: Mesh, order: int = 1):
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        self.mesh = mesh
        self.order = order
        nv = mesh.n_vertices
        if order == 1:
            self.cell_dofs = np.asarray(mesh.triangles)
            self.dof_coords = np.asarray(mesh.vertices)
            self.boundary_edge_dofs = np.asarray(mesh.boundary_edges)
        else:
            edges, tri_edges = mesh.edges()
            self.cell_dofs = np.hstack([mesh.triangles, nv + tri_edges])
            mid = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
            self.dof_coords = np.vstack([mesh.vertices, mid])
            bidx = _edge_lookup(edges, mesh.boundary_edges, nv)
            self.boundary_edge_dofs = np.column_stack([mesh.boundary_edges, nv + bidx])
        self.cell_dofs.setflags(write=False)
        self.dof_coords.setflags(write=False)
        self._cache: dict = {}

    @property
    def dof_count(self) -> int:
        return len(self.dof_coords)

    def boundary_dofs(self, tag: Tag) -> np.ndarray:
        sel = np.asarray(self.mesh.boundary_tags) == tag
        return np.unique(self.boundary_edge_dofs[sel])

    def interpolate(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return np.asarray(fn(self.dof_coords), dtype=float)

    def _geometry(self):
        V = self.mesh.vertices
        T = self.mesh.triangles
        p0 = V[T[:, 0]]
        J = np.stack([V[T[:, 1]] - p0, V[T[:, 2]] - p0], axis=2)  # columns are edge vectors
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        inv_t = np.empty_like(J)  # J^{-T}
        inv_t[:, 0, 0] = J[:, 1, 1] / det
        inv_t[:, 0, 1] = -J[:, 1, 0] / det
        inv_t[:, 1, 0] = -J[:, 0, 1] / det
        inv_t[:, 1, 1] = J[:, 0, 0] / det
        return p0, J, det, inv_t

    def _scatter(self, local: np.ndarray) -> sp.csr_matrix:
        nb = self.cell_dofs.shape[1]
        rows = np.repeat(self.cell_dofs, nb, axis=1).ravel()
        cols = np.tile(self.cell_dofs, (1, nb)).ravel()
        n = self.dof_count
        A = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
        A.sum_duplicates()
        A.sort_indices()
        return A

    def stiffness(self) -> sp.csr_matrix:
        if "K" not in self._cache:
            self._cache["K"] = assemble_stiffness(self)
        return self._cache["K"]

    def mass(self) -> sp.csr_matrix:
        if "M" not in self._cache:
            self._cache["M"] = assemble_mass(self)
        return self._cache["M"]

    def evaluate(self, u: np.ndarray, points: np.ndarray, cells: np.ndarray) -> np.ndarray:
        """Evaluate ``u`` at ``points`` known to lie in triangles ``cells``."""
        p0, J, det, _ = self._geometry()
        d = points - p0[cells]
        Jc = J[cells]
        dc = det[cells]
        xi = np.column_stack([
            (Jc[:, 1, 1] * d[:, 0] - Jc[:, 0, 1] * d[:, 1]) / dc,
            (-Jc[:, 1, 0] * d[:, 0] + Jc[:, 0, 0] * d[:, 1]) / dc,
        ])
        vals, _ = _basis(self.order, xi)
        return np.einsum("qb,qb->q", vals, u[self.cell_dofs[cells]])


def _quadrature(order: int):
    return _QUAD_P1 if order == 1 else _QUAD_P2


def assemble_stiffness(space: FemSpace) -> sp.csr_matrix:
    """Matrix of the form (u, v) -> integral of grad u . grad v."""
    _, _, det, inv_t = space._geometry()
    xi, w = _quadrature(space.order)
    _, dphi = _basis(space.order, xi)
    nb = dphi.shape[1]
    local = np.zeros((space.mesh.n_triangles, nb, nb))
    for q in range(len(w)):
        g = np.einsum("eij,bj->ebi", inv_t, dphi[q])
        local += (w[q] * np.abs(det))[:, None, None] * np.einsum("eai,ebi->eab", g, g)
    return space._scatter(local)


def assemble_mass(space: FemSpace) -> sp.csr_matrix:
    """Matrix of the form (u, v) -> integral of u v."""
    _, _, det, _ = space._geometry()
    xi, w = _quadrature(space.order)
    phi, _ = _basis(space.order, xi)
    ref = np.einsum("q,qa,qb->ab", w, phi, phi)
    local = np.abs(det)[:, None, None] * ref[None]
    return space._scatter(local)


@dataclass(frozen=True)
class BoundaryTrace:
    """Datum ``f`` on the hole boundary.

    ``fn(x, nu)`` receives quadrature points (q, 2) and the exact unit normal of
    the perforated domain there (pointing into the hole) and returns (q,) values.
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray, nu: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(x, nu), dtype=float) * np.ones(len(x))

    @classmethod
    def constant(cls, c: float) -> "BoundaryTrace":
        return cls(lambda x, nu: np.full(len(x), float(c)))

    @classmethod
    def of_point(cls, g: Callable[[np.ndarray], np.ndarray]) -> "BoundaryTrace":
        return cls(lambda x, nu: g(x))

    @classmethod
    def of_angle(cls, g: Callable[[np.ndarray], np.ndarray], center) -> "BoundaryTrace":
        c = np.asarray(center, dtype=float)
        return cls(lambda x, nu: g(np.arctan2(x[:, 1] - c[1], x[:, 0] - c[0])))


def normal_derivative(grad: Callable[[np.ndarray], np.ndarray]) -> BoundaryTrace:
    """Trace of the normal derivative of a function with gradient ``grad(x) -> (q, 2)``."""
    return BoundaryTrace(lambda x, nu: np.einsum("qi,qi->q", grad(x), nu))


def boundary_quadrature(space: FemSpace, tag: Tag = Tag.HOLE):
    """Gauss points, weights, exact domain normals and basis values on tagged edges."""
    mesh = space.mesh
    sel = np.asarray(mesh.boundary_tags) == tag
    if not sel.any():
        raise NoHoleError("mesh has no Hole-tagged boundary")
    edofs = space.boundary_edge_dofs[sel]
    a = mesh.vertices[edofs[:, 0]]
    b = mesh.vertices[edofs[:, 1]]
    t, wt = _GAUSS4
    s = 0.5 * (t + 1)  # Gauss nodes on [0, 1]
    length = np.hypot(*(b - a).T)
    x = a[:, None, :] + s[None, :, None] * (b - a)[:, None, :]
    w = 0.5 * wt[None, :] * length[:, None]
    if space.order == 1:
        vals = np.stack([1 - s, s], axis=1)
    else:
        vals = np.stack([(1 - s) * (1 - 2 * s), s * (2 * s - 1), 4 * s * (1 - s)], axis=1)
    spec = mesh.spec
    if tag == Tag.HOLE and spec is not None and spec.hole is not None:
        nu = spec.hole.domain_normal(x.reshape(-1, 2)).reshape(x.shape)
    else:
        d = (b - a) / length[:, None]
        # counterclockwise outer loop: outward normal is the tangent rotated clockwise
        nu = np.broadcast_to(np.column_stack([d[:, 1], -d[:, 0]])[:, None, :], x.shape).copy()
    return edofs, x, w, nu, vals


def assemble_boundary_load(space: FemSpace, f: BoundaryTrace, tag: Tag = Tag.HOLE) -> np.ndarray:
    """Vector with entries (integral over the tagged boundary of f times basis function i)."""
    edofs, x, w, nu, vals = boundary_quadrature(space, tag)
    fx = f(x.reshape(-1, 2), nu.reshape(-1, 2)).reshape(w.shape)
    contrib = np.einsum("eq,qb->eb", fx * w, vals)
    return np.bincount(edofs.ravel(), contrib.ravel(), minlength=space.dof_count)


def _check_dims(space: FemSpace, *vectors) -> None:
    for v in vectors:
        if np.shape(v) != (space.dof_count,):
            raise ValueError(f"vector of shape {np.shape(v)} does not match {space.dof_count} dofs")


def h1_inner(space: FemSpace, u: np.ndarray, v: np.ndarray) -> float:
    _check_dims(space, u, v)
    return float(u @ (space.stiffness() @ v) + u @ (space.mass() @ v))


def l2_inner(space: FemSpace, u: np.ndarray, v: np.ndarray) -> float:
    _check_dims(space, u, v)
    return float(u @ (space.mass() @ v))


def is_symmetric(A: sp.spmatrix, rtol: float = 1e-14) -> bool:
    diff = abs(A - A.T).max() if A.nnz else 0.0
    scale = abs(A).max() if A.nnz else 1.0
    return bool(diff <= rtol * scale)


def export_matrix_market(A: sp.spmatrix, target, comment: str = "") -> None:
    scipy.io.mmwrite(target, sp.coo_matrix(A), comment=comment, symmetry="general")


def assemble_all(mesh: Mesh, order: int = 1, space: Optional[FemSpace] = None):
    """Convenience: space, stiffness and mass for a mesh."""
    space = space or FemSpace(mesh, order)
    return space, space.stiffness(), space.mass()
