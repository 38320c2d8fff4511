"""Closed-form Neumann eigenfunctions and predicted eigenvalue shifts.

Eigenfunctions are normalized in L² and solve -Δφ + φ = λφ with zero normal
derivative.  Boxes use cosine products; disks use the radial Bessel modes
J0(α r / R) with α a positive zero of J1.
"""
from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import dblquad

from . import bessel
from .contour import contour_function
from .errors import DomainError, OrderTooHigh, SimplicityError
from .geometry import Circle, HoleSpec, Polygon

MultiIndex = Tuple[int, ...]


def multi_indices(dim: int, order: int):
    """All multi-indices of total degree ``order`` in ``dim`` variables, lexicographically descending."""
    if dim == 1:
        yield (order,)
        return
    for first in range(order, -1, -1):
        for rest in multi_indices(dim - 1, order - first):
            yield (first,) + rest


def _factorial(beta: MultiIndex) -> int:
    return math.prod(math.factorial(b) for b in beta)


def ball_volume(N: int) -> float:
    """Volume ω_N of the unit ball in R^N."""
    return math.pi ** (N / 2) / math.gamma(N / 2 + 1)


def gamma_prefactor(N: int) -> float:
    """Weight N/(N-1) of |∇φ|² in the interface indicator for ball-shaped holes."""
    return N / (N - 1)


# ---------------------------------------------------------------------------
# eigenfunctions
# ---------------------------------------------------------------------------


class AnalyticEigenfunction(ABC):
    dim: int
    lam: float
    simple: bool = True

    @abstractmethod
    def derivative(self, x, beta: MultiIndex) -> np.ndarray:
        """Partial derivative D^β φ at points ``x`` of shape (q, dim)."""

    @abstractmethod
    def derivative_table(self, x0, max_order: int) -> Dict[MultiIndex, float]:
        """All D^β φ(x0) with |β| <= max_order."""

    @abstractmethod
    def contains(self, x) -> np.ndarray:
        """Interior test for points ``x``."""

    @property
    @abstractmethod
    def bbox(self) -> tuple:
        """Bounding box (x_min, x_max, y_min, y_max, ...)."""

    def value(self, x) -> np.ndarray:
        return self.derivative(x, (0,) * self.dim)

    def gradient(self, x) -> np.ndarray:
        cols = []
        for i in range(self.dim):
            beta = tuple(1 if d == i else 0 for d in range(self.dim))
            cols.append(self.derivative(x, beta))
        return np.column_stack(cols)

    def laplacian(self, x) -> np.ndarray:
        out = 0.0
        for i in range(self.dim):
            beta = tuple(2 if d == i else 0 for d in range(self.dim))
            out = out + self.derivative(x, beta)
        return out

    def __call__(self, x) -> np.ndarray:
        return self.value(x)


def _trig_derivative(k: float, x: np.ndarray, order: int) -> np.ndarray:
    """d^order/dx^order cos(k x)."""
    r = order % 4
    base = np.cos(k * x) if r in (0, 2) else np.sin(k * x)
    sign = 1.0 if r in (0, 3) else -1.0
    return sign * k**order * base


@dataclass(frozen=True)
class BoxCosine(AnalyticEigenfunction):
    """Mode c Π cos(n_i π x_i / s_i) of the box Π (0, s_i)."""

    sides: tuple
    n: tuple
    simple: bool = True

    def __post_init__(self):
        if len(self.sides) != len(self.n) or any(s <= 0 for s in self.sides):
            raise ValueError("sides must be positive and match the multi-index")
        if any(v < 0 for v in self.n):
            raise ValueError("mode indices must be nonnegative")

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.array([ni * math.pi / s for ni, s in zip(self.n, self.sides)])

    @property
    def lam(self) -> float:
        return float(np.sum(self.wavenumbers**2)) + 1.0

    @property
    def norm_constant(self) -> float:
        return math.prod(1 / math.sqrt(s) if ni == 0 else math.sqrt(2 / s) for ni, s in zip(self.n, self.sides))

    @property
    def bbox(self) -> tuple:
        return tuple(v for s in self.sides for v in (0.0, float(s)))

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.all((x > 0) & (x < np.asarray(self.sides)), axis=1)

    def derivative(self, x, beta: MultiIndex) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.full(len(x), self.norm_constant)
        for i, (k, b) in enumerate(zip(self.wavenumbers, beta)):
            out = out * _trig_derivative(k, x[:, i], b)
        return out

    def derivative_table(self, x0, max_order: int) -> Dict[MultiIndex, float]:
        x0 = np.asarray(x0, dtype=float).reshape(1, -1)
        table = {}
        for order in range(max_order + 1):
            for beta in multi_indices(self.dim, order):
                table[beta] = float(self.derivative(x0, beta)[0])
        return table


def _poly_mul(a: np.ndarray, b: np.ndarray, K: int) -> np.ndarray:
    """Product of bivariate coefficient grids truncated to total degree K."""
    out = np.zeros((K + 1, K + 1))
    for i, j in zip(*np.nonzero(a)):
        for p, q in zip(*np.nonzero(b)):
            if i + p + j + q <= K:
                out[i + p, j + q] += a[i, j] * b[p, q]
    return out


@dataclass(frozen=True)
class DiskRadial(AnalyticEigenfunction):
    """Radial mode c J0(α_{0k} |x - center| / R) of the disk of radius R."""

    R: float
    k: int
    center: tuple = (0.0, 0.0)
    simple: bool = True

    def __post_init__(self):
        if self.R <= 0 or self.k < 1:
            raise ValueError("need R > 0 and k >= 1")

    dim = 2

    @property
    def alpha(self) -> float:
        return bessel.j1_zero(self.k)

    @property
    def a(self) -> float:
        return self.alpha / self.R

    @property
    def lam(self) -> float:
        return self.a**2 + 1.0

    @property
    def norm_constant(self) -> float:
        return 1.0 / (math.sqrt(math.pi) * self.R * abs(bessel.j0(self.alpha)))

    @property
    def bbox(self) -> tuple:
        cx, cy = self.center
        return (cx - self.R, cx + self.R, cy - self.R, cy + self.R)

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.hypot(x[:, 0] - self.center[0], x[:, 1] - self.center[1]) < self.R

    def radial(self, r, order: int = 0) -> np.ndarray:
        """d^order/dr^order of c J0(a r) for order <= 2."""
        z = self.a * np.asarray(r, dtype=float)
        c, a = self.norm_constant, self.a
        if order == 0:
            return c * bessel.j0(z)
        if order == 1:
            return -c * a * bessel.j1(z)
        if order == 2:
            # J1' = J0 - J1/z, written with J1/z to stay finite at z = 0
            return -c * a**2 * (bessel.j0(z) - bessel.jn_scaled(1, z))
        raise ValueError("radial derivatives are provided up to order 2")

    def _s_derivative(self, s: np.ndarray, p: int) -> np.ndarray:
        """p-th derivative of F(s) = c J0(a sqrt(s))."""
        z = self.a * np.sqrt(s)
        return self.norm_constant * (-self.a**2 / 2) ** p * bessel.jn_scaled(p, z)

    def _taylor_grid(self, x0, K: int) -> np.ndarray:
        u = np.asarray(x0, dtype=float) - np.asarray(self.center, dtype=float)
        s0 = float(u @ u)
        delta = np.zeros((K + 1, K + 1))
        if K >= 1:
            delta[1, 0], delta[0, 1] = 2 * u[0], 2 * u[1]
        if K >= 2:
            delta[2, 0] = delta[0, 2] = 1.0
        grid = np.zeros((K + 1, K + 1))
        power = np.zeros((K + 1, K + 1))
        power[0, 0] = 1.0
        for p in range(K + 1):
            grid += float(self._s_derivative(np.array(s0), p)) / math.factorial(p) * power
            power = _poly_mul(power, delta, K)
        return grid

    def derivative_table(self, x0, max_order: int) -> Dict[MultiIndex, float]:
        grid = self._taylor_grid(x0, max_order)
        table = {}
        for order in range(max_order + 1):
            for beta in multi_indices(2, order):
                table[beta] = float(grid[beta] * _factorial(beta))
        return table

    def derivative(self, x, beta: MultiIndex) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = x - np.asarray(self.center, dtype=float)
        s = np.einsum("ij,ij->i", d, d)
        order = sum(beta)
        if order == 0:
            return self._s_derivative(s, 0)
        if order == 1:
            i = beta.index(1)
            return 2 * d[:, i] * self._s_derivative(s, 1)
        if order == 2:
            f1, f2 = self._s_derivative(s, 1), self._s_derivative(s, 2)
            if 2 in beta:
                i = beta.index(2)
                return 4 * d[:, i] ** 2 * f2 + 2 * f1
            return 4 * d[:, 0] * d[:, 1] * f2
        return np.array([self._taylor_grid(p, order)[beta] * _factorial(beta) for p in x])

    def nodal_radii(self) -> List[float]:
        """Radii of the nodal circles, R j_{0,m} / α for the zeros j_{0,m} < α."""
        out, m = [], 1
        while bessel.j0_zero(m) < self.alpha:
            out.append(self.R * bessel.j0_zero(m) / self.alpha)
            m += 1
        return out


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoxMode:
    lam: float
    n: tuple
    simple: bool


def _squarefree_split(n: int) -> Tuple[int, int]:
    """Write n = t² m with m squarefree; return (t, m)."""
    t, m, d = 1, n, 2
    while d * d <= m:
        while m % (d * d) == 0:
            m //= d * d
            t *= d
        d += 1
    return t, m


def _exact_inverse_square(side: float) -> Optional[Tuple[Fraction, int]]:
    """Represent 1/side² exactly as q·sqrt(m), m squarefree, when side⁴ is a simple rational."""
    q4 = Fraction(side**4).limit_denominator(1000)
    if abs(float(q4) - side**4) > 1e-12 * side**4 or q4 <= 0:
        return None
    # 1/side² = sqrt(den/num) = sqrt(den*num)/num
    t, m = _squarefree_split(q4.numerator * q4.denominator)
    return Fraction(t, q4.numerator), m


def _exact_key(n: tuple, exact) -> tuple:
    acc: Dict[int, Fraction] = {}
    for ni, (q, m) in zip(n, exact):
        acc[m] = acc.get(m, Fraction(0)) + ni * ni * q
    return tuple(sorted((m, c) for m, c in acc.items() if c != 0))


def box_spectrum(sides: Sequence[float], count: int) -> List[BoxMode]:
    """Lowest ``count`` eigenvalues λ = Σ(n_i π / s_i)² + 1 with multiplicity flags.

    Ties are decided in exact arithmetic when every side has a rational fourth
    power (as for sides 1, 2^{1/4}, 3^{1/4}), otherwise with relative tolerance 1e-12.
    """
    sides = tuple(float(s) for s in sides)
    if any(s <= 0 for s in sides) or count < 1:
        raise ValueError("need positive sides and count >= 1")
    exact = [_exact_inverse_square(s) for s in sides]
    use_exact = all(e is not None for e in exact)
    M = max(2, count)
    while True:
        modes = []
        for n in itertools.product(range(M + 1), repeat=len(sides)):
            lam = sum((ni * math.pi / s) ** 2 for ni, s in zip(n, sides)) + 1.0
            modes.append((lam, n))
        modes.sort()
        cutoff = modes[count - 1][0]
        if all(((M + 1) * math.pi / s) ** 2 + 1 > cutoff for s in sides):
            break
        M *= 2
    out = []
    for idx in range(count):
        lam, n = modes[idx]
        if use_exact:
            key = _exact_key(n, exact)
            twins = [m for l, m in modes if m != n and abs(l - lam) <= 1e-9 * lam and _exact_key(m, exact) == key]
        else:
            twins = [m for l, m in modes if m != n and abs(l - lam) <= 1e-12 * lam]
        out.append(BoxMode(lam, n, not twins))
    return out


@dataclass(frozen=True)
class DiskMode:
    lam: float
    k: int
    alpha: float
    simple: bool = True


def disk_spectrum(R: float, count: int) -> List[DiskMode]:
    """Radial modes of the disk of radius R: λ = α_{0k}²/R² + 1 (R = 2 gives α²/4 + 1)."""
    if count < 1 or R <= 0:
        raise ValueError("need count >= 1 and R > 0")
    return [DiskMode(bessel.j1_zero(k) ** 2 / R**2 + 1.0, k, bessel.j1_zero(k)) for k in range(1, count + 1)]


# ---------------------------------------------------------------------------
# Taylor polynomials and vanishing order
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorPolynomial:
    """Homogeneous polynomial Σ_{|β|=k} D^β φ(x0) y^β / β! in the displacement y = x - x0."""

    x0: tuple
    order: int
    coeffs: Dict[MultiIndex, float] = field(hash=False)

    @classmethod
    def from_table(cls, x0, order: int, table: Dict[MultiIndex, float]) -> "TaylorPolynomial":
        dim = len(next(iter(table)))
        coeffs = {b: table[b] / _factorial(b) for b in multi_indices(dim, order)}
        return cls(tuple(float(v) for v in np.ravel(x0)), order, coeffs)

    @property
    def dim(self) -> int:
        return len(self.x0)

    def derivative(self, beta: MultiIndex) -> float:
        """D^β φ(x0) for |β| = order."""
        return self.coeffs.get(tuple(beta), 0.0) * _factorial(beta)

    def __call__(self, y) -> np.ndarray:
        y = np.atleast_2d(np.asarray(y, dtype=float))
        out = np.zeros(len(y))
        for beta, c in self.coeffs.items():
            out += c * np.prod(y ** np.asarray(beta), axis=1)
        return out

    def laplacian(self) -> Dict[MultiIndex, float]:
        out: Dict[MultiIndex, float] = {}
        for beta, c in self.coeffs.items():
            for i, b in enumerate(beta):
                if b >= 2:
                    nb = tuple(v - 2 if d == i else v for d, v in enumerate(beta))
                    out[nb] = out.get(nb, 0.0) + c * b * (b - 1)
        return out

    def harmonic_defect(self) -> float:
        lap = self.laplacian()
        return max((abs(v) for v in lap.values()), default=0.0)

    def sphere_integral_sq(self) -> float:
        """∫ over the unit sphere of P², from exact monomial moments."""
        total = 0.0
        items = list(self.coeffs.items())
        for b1, c1 in items:
            for b2, c2 in items:
                alpha = [u + v for u, v in zip(b1, b2)]
                if any(a % 2 for a in alpha):
                    continue
                moment = 2 * math.prod(math.gamma((a + 1) / 2) for a in alpha) / math.gamma(
                    (sum(alpha) + self.dim) / 2)
                total += c1 * c2 * moment
        return total

    def monomials(self) -> Dict[Tuple[int, int], float]:
        """2D coefficients keyed by (power of x, power of y)."""
        if self.dim != 2:
            raise ValueError("monomial form is provided for the plane only")
        return dict(self.coeffs)


def vanishing_order(phi: AnalyticEigenfunction, x0, k_max: int = 6, tol: float = 1e-9):
    """Smallest k >= 1 with a nonzero order-k derivative of φ - φ(x0) at x0.

    Derivatives are called zero when below ``tol`` times the largest derivative
    magnitude over orders 1..k_max.
    """
    table = phi.derivative_table(x0, k_max)
    scale = max(abs(v) for b, v in table.items() if sum(b) >= 1)
    if scale == 0:
        raise OrderTooHigh(f"all derivatives up to order {k_max} vanish")
    for k in range(1, k_max + 1):
        if any(abs(table[b]) > tol * scale for b in multi_indices(phi.dim, k)):
            return k, TaylorPolynomial.from_table(x0, k, table)
    raise OrderTooHigh(f"all derivatives up to order {k_max} vanish")


# ---------------------------------------------------------------------------
# predictions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftPrediction:
    """Leading term Δλ(ε) ≈ coefficient · ε^exponent · |log ε|^[log_correction].

    ``coefficient`` is signed (negative: the hole lowers the eigenvalue) and is
    the sum of ``torsion_term`` and ``volume_term``.  ``diagnostic`` optionally
    carries a subleading (coefficient, exponent, log flag) triple.
    """

    exponent: float
    coefficient: float
    torsion_term: float
    volume_term: float
    case: str
    log_correction: bool = False
    diagnostic: Optional[Tuple[float, float, bool]] = None

    def delta(self, eps) -> np.ndarray:
        eps = np.asarray(eps, dtype=float)
        out = self.coefficient * eps**self.exponent
        if self.log_correction:
            out = out * np.abs(np.log(eps))
        return out

    def diagnostic_delta(self, eps) -> np.ndarray:
        if self.diagnostic is None:
            return np.zeros_like(np.asarray(eps, dtype=float))
        c, p, flag = self.diagnostic
        eps = np.asarray(eps, dtype=float)
        return c * eps**p * (np.abs(np.log(eps)) if flag else 1.0)


def _point(x0) -> np.ndarray:
    return np.asarray(x0, dtype=float).reshape(1, -1)


def singular_point(phi: AnalyticEigenfunction, x0, tol: float = 1e-9) -> bool:
    """Whether x0 is a nodal point where the gradient also vanishes."""
    table = phi.derivative_table(x0, 2)
    scale = max(abs(v) for v in table.values())
    grad = [table[b] for b in multi_indices(phi.dim, 1)]
    return abs(table[(0,) * phi.dim]) <= tol * scale and max(abs(g) for g in grad) <= tol * scale


def predict_shift_2d(phi: AnalyticEigenfunction, x0, k_max: int = 6, tol: float = 1e-9) -> ShiftPrediction:
    """Leading eigenvalue shift for a small disk hole centred at x0 in the plane."""
    if phi.dim != 2:
        raise DomainError("planar prediction needs a 2D eigenfunction")
    if not phi.simple:
        raise SimplicityError("eigenvalue is not simple")
    lam = phi.lam
    k, P = vanishing_order(phi, x0, k_max, tol)
    p = _point(x0)
    value = float(phi.value(p)[0])
    grad = phi.gradient(p)[0]
    scale = max(abs(v) for v in phi.derivative_table(x0, k_max).values())
    nodal = abs(value) <= tol * scale
    if k == 1 or not nodal:
        g2 = float(grad @ grad) if k == 1 else 0.0
        torsion = -math.pi * (gamma_prefactor(2) - 1) * g2
        volume = -math.pi * (g2 - (lam - 1) * value**2)
        diagnostic = None
        case = "regular"
        if k >= 2:
            case = "critical"
            diagnostic = (-0.5 * math.pi * (lam - 1) ** 2 * value**2, 4.0, True)
        return ShiftPrediction(2.0, torsion + volume, torsion, volume, case, False, diagnostic)
    c1 = P.derivative((k, 0)) / math.factorial(k)
    c2 = P.derivative((k - 1, 1)) / math.factorial(k)
    half = -math.pi * k * (c1**2 + c2**2)
    return ShiftPrediction(2.0 * k, 2 * half, half, half, "singular")


def predict_shift_Nd(N: int, lam: float, value: float = 0.0, gradient: Sequence[float] = (),
                     taylor: Optional[TaylorPolynomial] = None) -> ShiftPrediction:
    """Leading eigenvalue shift for a small ball hole in dimension N >= 3.

    Regular data (value, gradient) give the ε^N law; at a singular point pass the
    harmonic Taylor polynomial of the vanishing order k for the ε^(N+2k-2) law.
    """
    if N < 3:
        raise DomainError("this prediction covers N >= 3")
    g2 = float(np.dot(gradient, gradient)) if len(gradient) else 0.0
    w = ball_volume(N)
    if value != 0.0 or g2 != 0.0 or taylor is None:
        torsion = -w * (gamma_prefactor(N) - 1) * g2
        volume = -w * (g2 - (lam - 1) * value**2)
        return ShiftPrediction(float(N), torsion + volume, torsion, volume, "regular")
    k = taylor.order
    y2 = taylor.sphere_integral_sq()
    torsion = -k**2 / (N + k - 2) * y2
    volume = -k * y2
    return ShiftPrediction(float(N + 2 * k - 2), torsion + volume, torsion, volume, "singular")


@dataclass(frozen=True)
class TermSplit:
    """Two-term shift prediction Δλ ≈ -T - ∫_hole(|∇φ|² - (λ-1)φ²)."""

    torsion: float
    volume: float

    @property
    def delta(self) -> float:
        return -self.torsion - self.volume


def predict_shift_general(T_eps: float, volume: float) -> TermSplit:
    return TermSplit(float(T_eps), float(volume))


def volume_term(phi: AnalyticEigenfunction, hole: HoleSpec, epsrel: float = 1e-8) -> float:
    """∫ over the hole of |∇φ|² - (λ-1)φ² by adaptive quadrature."""
    lam = phi.lam

    def integrand(x, y):
        p = np.array([[x, y]])
        g = phi.gradient(p)[0]
        v = phi.value(p)[0]
        return float(g @ g - (lam - 1) * v * v)

    cx, cy = hole.center
    if isinstance(hole.shape, Circle):
        eps = hole.eps
        val, _ = dblquad(lambda r, t: integrand(cx + r * math.cos(t), cy + r * math.sin(t)) * r,
                         0.0, 2 * math.pi, 0.0, eps, epsabs=0.0, epsrel=epsrel)
        return float(val)
    if isinstance(hole.shape, Polygon):
        V = np.asarray(hole.center) + hole.eps * np.asarray(hole.shape.vertices, dtype=float)
        c = np.asarray(hole.center, dtype=float)
        total = 0.0
        for a, b in zip(V, np.roll(V, -1, axis=0)):
            # fan triangle (c, a, b), mapped from the unit simplex
            J = abs((a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]))
            val, _ = dblquad(
                lambda v, u: integrand(*(c + u * (a - c) + v * (b - c))) * J,
                0.0, 1.0, 0.0, lambda u: 1.0 - u, epsabs=0.0, epsrel=epsrel)
            total += val
        return float(total)
    raise DomainError(f"unsupported hole shape {hole.shape!r}")


# ---------------------------------------------------------------------------
# interface Γ
# ---------------------------------------------------------------------------


def gamma_indicator(phi: AnalyticEigenfunction, x, N: Optional[int] = None) -> np.ndarray:
    """h(x) = N/(N-1)|∇φ|² - (λ-1)φ²; the hole lowers λ where h > 0 and raises it where h < 0."""
    N = phi.dim if N is None else N
    x = np.atleast_2d(np.asarray(x, dtype=float))
    g = phi.gradient(x)
    v = phi.value(x)
    return gamma_prefactor(N) * np.einsum("ij,ij->i", g, g) - (phi.lam - 1) * v**2


def gamma_contour(phi: AnalyticEigenfunction, shape=(401, 401), iso: float = 0.0, bbox=None):
    """Polylines of {h = iso} inside the domain of a planar eigenfunction."""
    if phi.dim != 2:
        raise DomainError("contours are extracted for planar eigenfunctions")
    return contour_function(lambda p: gamma_indicator(phi, p), bbox or phi.bbox, shape, iso, phi.contains)


def nodal_contour(phi: AnalyticEigenfunction, shape=(401, 401), bbox=None):
    return contour_function(phi.value, bbox or phi.bbox, shape, 0.0, phi.contains)


def _bisect(f, lo: float, hi: float) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo if abs(f(lo)) <= abs(f(hi)) else hi


def disk_gamma_radii(phi: DiskRadial, samples: int = 4000) -> List[float]:
    """Radii where h vanishes for a radial disk mode (circles 2J1² = J0² in z = α r / R)."""
    def h(r):
        return float(gamma_indicator(phi, np.array([[phi.center[0] + r, phi.center[1]]]))[0])

    r = np.linspace(0.0, phi.R, samples + 1)[1:-1]
    vals = gamma_indicator(phi, np.column_stack([phi.center[0] + r, np.full_like(r, phi.center[1])]))
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
        roots.append(_bisect(h, r[i], r[i + 1]))
    return roots


def box_gamma_levels(box: BoxCosine, N: Optional[int] = None) -> List[float]:
    """Coordinates of the Γ hyperplanes of a box mode with a single nonzero index."""
    nz = [i for i, v in enumerate(box.n) if v]
    if len(nz) != 1:
        raise ValueError("planar interfaces arise for modes with one nonzero index")
    N = box.dim if N is None else N
    i = nz[0]
    n, s = box.n[i], box.sides[i]
    # h ∝ N/(N-1) sin²(kx) - cos²(kx): tan²(kx) = (N-1)/N
    t = math.atan(math.sqrt(1 / gamma_prefactor(N)))
    out = []
    for m in range(n):
        out += [(s / (n * math.pi)) * (t + m * math.pi), (s / (n * math.pi)) * (math.pi - t + m * math.pi)]
    return sorted(out)
