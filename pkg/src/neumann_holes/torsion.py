"""Torsion functions and torsional rigidities.

Three routes are provided: the finite-element torsion problem on a perforated
mesh, the explicit Fourier series solution on an annulus, and the closed form
(plus a radial ODE check) for exterior balls in dimension N >= 3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .assembly import BoundaryTrace, FemSpace, assemble_boundary_load, boundary_quadrature
from .errors import DomainError, NoHoleError, OdeError, ZeroVector
from .geometry import Tag
from .linalg import SparseCholesky


@dataclass(frozen=True)
class TorsionSolution:
    """Discrete torsion function ``U`` and rigidity ``T``.

    ``T`` is computed as minus twice the minimum energy; ``load_identity`` and
    ``energy_identity`` are the relative gaps to bᵀU and to the energy norm of U.
    """

    U: np.ndarray
    T: float
    b: np.ndarray
    residual: float
    load_identity: float
    energy_identity: float


def _finish(A: sp.spmatrix, U: np.ndarray, b: np.ndarray) -> TorsionSolution:
    AU = A @ U
    bU = float(b @ U)
    UAU = float(U @ AU)
    T = 2 * bU - UAU
    nb = np.linalg.norm(b)
    residual = float(np.linalg.norm(AU - b) / nb) if nb > 0 else 0.0
    scale = abs(T) if T != 0 else 1.0
    U = U.copy()
    U.setflags(write=False)
    return TorsionSolution(U, float(T), b, residual, abs(T - bU) / scale, abs(T - UAU) / scale)


def solve_interior_torsion(space: FemSpace, K: sp.spmatrix, M: sp.spmatrix, f: BoundaryTrace,
                           factor: Optional[SparseCholesky] = None) -> TorsionSolution:
    """Solve (K+M)U = b with b the hole-boundary load of ``f``."""
    if not space.mesh.has_hole:
        raise NoHoleError("torsion needs a Hole-tagged boundary")
    b = assemble_boundary_load(space, f)
    A = sp.csr_matrix(K + M)
    if not np.any(b):
        return _finish(A, np.zeros_like(b), b)
    factor = factor or SparseCholesky(A)
    U = factor.solve(b)
    return _finish(A, U, b)


def solve_zero_mean_torsion(space: FemSpace, K: sp.spmatrix, M: sp.spmatrix,
                            f: BoundaryTrace) -> TorsionSolution:
    """Gradient-only torsion with zero-average normalization.

    Solves ∫∇W·∇v = ∫_{∂hole} f (v - mean v) over the mesh with ∫W = 0.  This is
    the problem whose rigidity the annulus Fourier series evaluates.
    """
    if not space.mesh.has_hole:
        raise NoHoleError("torsion needs a Hole-tagged boundary")
    b = assemble_boundary_load(space, f)
    K = sp.csr_matrix(K)
    m1 = np.asarray(M @ np.ones(space.dof_count)).ravel()
    area = m1.sum()
    rhs = b - (b.sum() / area) * m1
    if not np.any(b):
        return _finish(K, np.zeros_like(b), rhs)
    # pin one dof to remove the constant kernel, then restore the zero mean
    keep = np.arange(1, space.dof_count)
    W = np.zeros(space.dof_count)
    W[keep] = SparseCholesky(K[keep][:, keep]).solve(rhs[keep])
    W -= (m1 @ W) / area
    return _finish(K, W, rhs)


def sup_characterization_bound(space: FemSpace, K: sp.spmatrix, M: sp.spmatrix,
                               f: BoundaryTrace, u: np.ndarray,
                               b: Optional[np.ndarray] = None) -> float:
    """Lower bound (bᵀu)² / uᵀ(K+M)u for the discrete rigidity."""
    u = np.asarray(u, dtype=float)
    if b is None:
        b = assemble_boundary_load(space, f)
    energy = float(u @ (K @ u) + u @ (M @ u))
    if not np.any(u) or energy <= 0:
        raise ZeroVector("test vector must be nonzero")
    return float(b @ u) ** 2 / energy


def divergence_check(space: FemSpace) -> float:
    """Relative error of ∫_{∂hole} ∂_ν|x - x0|² ds = -4|hole| with ν the domain normal.

    A wrong normal orientation flips the sign of the left side, so the value
    jumps to about 2.
    """
    spec = space.mesh.spec
    if spec is None or spec.hole is None:
        raise NoHoleError("divergence check needs a mesh with a hole description")
    c = np.asarray(spec.hole.center, dtype=float)
    f = BoundaryTrace(lambda x, nu: 2 * np.einsum("qi,qi->q", x - c, nu))
    _, x, w, nu, _ = boundary_quadrature(space, Tag.HOLE)
    lhs = float(np.sum(w * f(x.reshape(-1, 2), nu.reshape(-1, 2)).reshape(w.shape)))
    # area enclosed by the hole polyline, consistent with the discrete boundary
    e = space.mesh.tagged_edges(Tag.HOLE)
    V = space.mesh.vertices
    a, bb = V[e[:, 0]] - c, V[e[:, 1]] - c
    enclosed = 0.5 * abs(float(np.sum(a[:, 0] * bb[:, 1] - a[:, 1] * bb[:, 0])))
    return abs(lhs + 4 * enclosed) / (4 * enclosed)


# ---------------------------------------------------------------------------
# annulus Fourier series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierHoleData:
    """Fourier coefficients of f_j(t) = P_j(cos t, sin t) for a degree-j homogeneous P_j.

    ``a`` holds a_0..a_j and ``b`` holds b_1..b_j (``b[0]`` is b_1).
    """

    j: int
    a: tuple
    b: tuple

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("degree j must be at least 1")
        a = tuple(float(v) for v in self.a) + (0.0,) * (self.j + 1 - len(self.a))
        b = tuple(float(v) for v in self.b) + (0.0,) * (self.j - len(self.b))
        if len(a) != self.j + 1 or len(b) != self.j:
            raise ValueError("coefficients beyond order j must vanish")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_function(cls, j: int, fj) -> "FourierHoleData":
        """Coefficients of a trigonometric polynomial of degree ≤ j sampled exactly by FFT."""
        n = 4 * j + 4
        t = 2 * np.pi * np.arange(n) / n
        c = np.fft.rfft(fj(t)) / n
        a = [2 * c[0].real] + [2 * c[i].real for i in range(1, j + 1)]
        b = [-2 * c[i].imag for i in range(1, j + 1)]
        return cls(j, tuple(a), tuple(b))

    @classmethod
    def from_polynomial(cls, coeffs: dict, j: int) -> "FourierHoleData":
        """From monomial coefficients {(p, q): c} of x^p y^q with p + q = j."""
        def fj(t):
            x, y = np.cos(t), np.sin(t)
            return sum(c * x**p * y**q for (p, q), c in coeffs.items())

        return cls.from_function(j, fj)

    def f(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.a[0] / 2)
        for i in range(1, self.j + 1):
            out = out + self.a[i] * np.cos(i * t) + self.b[i - 1] * np.sin(i * t)
        return out

    def trace(self, center, eps: float) -> BoundaryTrace:
        """∂_νP_j on the circle of radius ``eps`` around ``center``: -j eps^(j-1) f_j(t)."""
        j = self.j
        return BoundaryTrace.of_angle(lambda t: -j * eps ** (j - 1) * self.f(t), center)


def _check_radii(eps: float, R: float) -> None:
    if not (0 < eps < R):
        raise DomainError(f"need 0 < eps < R (eps={eps}, R={R})")


def annulus_phi0(r, eps: float, R: float, data: FourierHoleData):
    """Radial profile of the mean mode of the zero-average annulus solution."""
    j, a0 = data.j, data.a[0]
    r = np.asarray(r, dtype=float)
    const = (0.5 + (eps**2 * math.log(eps) - R**2 * math.log(R)) / (R**2 - eps**2)
             + (R**2 + eps**2) / (4 * R**2))
    pref = j * a0 * eps**j / (1 - (eps / R) ** 2)
    return pref * (np.log(r) - r**2 / (2 * R**2) + const)


def annulus_phi(i: int, r, eps: float, R: float, coeff: float, j: int):
    """Radial profile of the cos/sin modes of order ``i >= 1``."""
    r = np.asarray(r, dtype=float)
    return -j * coeff * eps ** (i + j) / (i * (R ** (2 * i) - eps ** (2 * i))) * (r**i + R ** (2 * i) * r ** (-i))


def annulus_solution(x: np.ndarray, eps: float, R: float, data: FourierHoleData, center=(0.0, 0.0)):
    """Zero-average solution W evaluated at points ``x`` of the annulus."""
    d = np.atleast_2d(x) - np.asarray(center, dtype=float)
    r = np.hypot(d[:, 0], d[:, 1])
    t = np.arctan2(d[:, 1], d[:, 0])
    out = annulus_phi0(r, eps, R, data) / 2
    for i in range(1, data.j + 1):
        out = out + annulus_phi(i, r, eps, R, data.a[i], data.j) * np.cos(i * t)
        out = out + annulus_phi(i, r, eps, R, data.b[i - 1], data.j) * np.sin(i * t)
    return out


def annulus_fourier_torsion(eps: float, R: float, data: FourierHoleData) -> float:
    """Exact rigidity of the annulus B_R minus B_eps for the data ∂_νP_j."""
    _check_radii(eps, R)
    j = data.j
    s = data.a[0] * float(annulus_phi0(eps, eps, R, data)) / 2
    for i in range(1, j + 1):
        s += data.a[i] * float(annulus_phi(i, eps, eps, R, data.a[i], j))
        s += data.b[i - 1] * float(annulus_phi(i, eps, eps, R, data.b[i - 1], j))
    return -j * eps**j * math.pi * s


def annulus_torsion_leading(eps: float, data: FourierHoleData) -> float:
    """Leading-order behaviour of the annulus rigidity as eps -> 0."""
    j = data.j
    if data.a[0] != 0:
        return 0.5 * math.pi * j**2 * data.a[0] ** 2 * eps ** (2 * j) * abs(math.log(eps))
    s = sum((data.a[i] ** 2 + data.b[i - 1] ** 2) / i for i in range(1, j + 1))
    return math.pi * j**2 * s * eps ** (2 * j)


# ---------------------------------------------------------------------------
# exterior ball
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExteriorTorsion:
    N: int
    k: int
    Y_norm_sq: float
    tau: float


def exterior_ball_torsion(N: int, k: int, Y_norm_sq: float) -> ExteriorTorsion:
    """Rigidity of the unit-ball exterior for data ∂_νP with P = r^k Y."""
    if N < 3:
        raise DomainError("exterior torsion is defined for N >= 3")
    if k < 1:
        raise ValueError("degree k must be at least 1")
    if Y_norm_sq < 0:
        raise ValueError("Y_norm_sq must be nonnegative")
    return ExteriorTorsion(N, k, float(Y_norm_sq), k**2 / (N + k - 2) * float(Y_norm_sq))


@dataclass(frozen=True)
class RadialCheck:
    max_rel_deviation: float
    u_at_1: float
    du_at_1: float
    decay_exponent: float

    def tau(self, Y_norm_sq: float) -> float:
        """Boundary identity: τ = ∫ f U = -u'(1) u(1) ∫ Y² (f = -kY, U = u Y on the sphere)."""
        return -self.du_at_1 * self.u_at_1 * Y_norm_sq


def radial_exterior_ode_check(N: int, k: int, R_max: float = 20.0, rtol: float = 1e-13) -> RadialCheck:
    """Integrate the exterior radial equation and compare with its closed-form solution.

    The decaying mode is selected at ``R_max`` from the Euler characteristic roots
    and integrated inward, the stable direction for that mode; the result is then
    scaled so that u'(1) = k.
    """
    if N < 3:
        raise DomainError("exterior problem requires N >= 3")
    if k < 1:
        raise ValueError("degree k must be at least 1")
    if R_max < 10:
        raise ValueError("R_max must be at least 10")
    c = k * (N + k - 2)
    # roots of s(s-1) + (N-1)s - c = 0
    disc = math.sqrt((N - 2) ** 2 + 4 * c)
    p = ((N - 2) + disc) / 2  # decaying exponent: u ~ r^-p

    def rhs(r, y):
        u, du = y
        return [du, -(N - 1) / r * du + c / r**2 * u]

    y0 = [R_max ** (-p), -p * R_max ** (-p - 1)]
    grid = np.geomspace(R_max, 1.0, 2001)
    grid[-1] = 1.0
    sol = solve_ivp(rhs, (R_max, 1.0), y0, method="DOP853", t_eval=grid, rtol=rtol, atol=1e-300)
    if not sol.success:
        raise OdeError(sol.message)
    u, du = sol.y
    if du[-1] == 0 or not np.all(np.isfinite(u)):
        raise OdeError("shooting failed to produce a usable decaying solution")
    scale = k / du[-1]
    u, du = u * scale, du * scale
    exact = -k / (N + k - 2) * grid ** (-(N + k - 2))
    dev = float(np.max(np.abs(u - exact) / np.abs(exact)))
    return RadialCheck(dev, float(u[-1]), float(du[-1]), p)
