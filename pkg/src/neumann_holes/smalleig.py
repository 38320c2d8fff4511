"""Numerical check of the small-eigenvalue lemma on finite-dimensional forms.

For a symmetric form q with eigenpair (λ, φ), a unit vector f and a q-orthogonal
splitting {φ}^⊥ = H1 ⊕ H2, the lemma bounds

    ‖f - Πf‖ ≤ √2 δ / γ   and   |λ - q(f, f)| ≤ 2|λ| δ²/γ² + 2δ²/γ,

with δ = sup |q(f, v)|/‖v‖ and γ = min(γ1, γ2) the smallest |q(v, v)|/‖v‖² on H1, H2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import HypothesisError


@dataclass(frozen=True)
class SmallEigInstance:
    """Form ``Q`` in the Euclidean inner product with the lemma's data."""

    Q: np.ndarray
    f: np.ndarray
    lam: float
    phi: np.ndarray
    H1: np.ndarray  # (dim, d1) orthonormal columns
    H2: np.ndarray  # (dim, d2) orthonormal columns

    @property
    def dim(self) -> int:
        return len(self.f)


@dataclass(frozen=True)
class SmallEigReport:
    delta: float
    gamma1: float
    gamma2: float
    xi: float
    proj_coeff: float
    dist: float
    lam_gap: float
    lam: float = 0.0

    @property
    def gamma(self) -> float:
        return min(self.gamma1, self.gamma2)

    @property
    def bound1(self) -> float:
        return math.sqrt(2) * self.delta / self.gamma

    @property
    def bound2(self) -> float:
        return 2 * abs(self.lam) * self.delta**2 / self.gamma**2 + 2 * self.delta**2 / self.gamma

    @property
    def pass1(self) -> bool:
        return self.dist <= self.bound1 * (1 + 1e-12) + 1e-14

    @property
    def pass2(self) -> bool:
        return self.lam_gap <= self.bound2 * (1 + 1e-12) + 1e-14 * max(1.0, abs(self.lam))

    @property
    def passed(self) -> bool:
        return self.pass1 and self.pass2


def _min_abs_form(Q: np.ndarray, B: np.ndarray) -> float:
    """inf |vᵀQv| / ‖v‖² over span(B); zero when the restricted form is indefinite."""
    if B.shape[1] == 0:
        return math.inf
    w = np.linalg.eigvalsh(B.T @ Q @ B)
    if w.min() < 0 < w.max():
        return 0.0
    return float(np.min(np.abs(w)))


def validate_instance(inst: SmallEigInstance, tol_eig: float = 1e-12, tol_cross: float = 1e-10) -> None:
    Q, phi = inst.Q, inst.phi
    scale = max(np.linalg.norm(Q, 2), 1.0)
    if abs(np.linalg.norm(phi) - 1) > 1e-12 or abs(np.linalg.norm(inst.f) - 1) > 1e-12:
        raise HypothesisError("phi and f must be unit vectors")
    if np.linalg.norm(Q @ phi - inst.lam * phi) > tol_eig * scale:
        raise HypothesisError("phi is not an eigenvector of Q for lam")
    B = np.hstack([phi[:, None], inst.H1, inst.H2])
    if B.shape[1] != inst.dim:
        raise HypothesisError("H1 and H2 must complete phi to the whole space")
    if np.max(np.abs(B.T @ B - np.eye(B.shape[1]))) > 1e-10:
        raise HypothesisError("phi, H1 and H2 must be mutually orthonormal")
    if inst.H1.shape[1] and inst.H2.shape[1]:
        cross = np.max(np.abs(inst.H1.T @ Q @ inst.H2))
        if cross > tol_cross * scale:
            raise HypothesisError(f"q(H1, H2) = {cross:.3e} is not zero")


def verify_small_eig(inst: SmallEigInstance) -> SmallEigReport:
    """Compute δ, γ1, γ2, ξ and Πf and evaluate both bounds."""
    validate_instance(inst)
    Q, f, phi = inst.Q, inst.f, inst.phi
    delta = float(np.linalg.norm(Q @ f))
    g1 = _min_abs_form(Q, inst.H1)
    g2 = _min_abs_form(Q, inst.H2)
    if not (g1 > 0 and g2 > 0):
        raise HypothesisError("gamma1 and gamma2 must be positive")
    c = float(phi @ f)
    if abs(c) < 1e-14:
        c = 0.0
    dist = float(np.linalg.norm(f - c * phi))
    xi = float(f @ Q @ f)
    return SmallEigReport(delta, g1, g2, xi, c, dist, abs(inst.lam - xi), lam=inst.lam)


def from_gram(Q: np.ndarray, G: np.ndarray, f: np.ndarray, lam: float, phi: np.ndarray,
              H1: np.ndarray, H2: np.ndarray) -> SmallEigInstance:
    """Rewrite a form given in the inner product xᵀGy as a Euclidean instance.

    Vectors are G-normalized/G-orthonormal on input; with G = LLᵀ the map x ↦ Lᵀx
    is an isometry onto the Euclidean space.
    """
    L = np.linalg.cholesky(G)
    Linv = scipy.linalg.solve_triangular(L, np.eye(len(G)), lower=True)
    Qe = Linv @ Q @ Linv.T
    Qe = 0.5 * (Qe + Qe.T)
    return SmallEigInstance(Qe, L.T @ f, float(lam), L.T @ phi, L.T @ H1, L.T @ H2)


def random_instance(rng: np.random.Generator, dim: int, perturbation: float,
                    gap: float = 0.5) -> SmallEigInstance:
    """Random admissible instance: conjugated spectrum with a gap around λ, f near φ."""
    lam = rng.uniform(-0.2, 0.2)
    n_below = int(rng.integers(0, dim))
    below = lam - gap - rng.exponential(2.0, n_below)
    above = lam + gap + rng.exponential(2.0, dim - 1 - n_below)
    V, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    spectrum = np.concatenate([[lam], below, above])
    Q = (V * spectrum) @ V.T
    Q = 0.5 * (Q + Q.T)
    phi = V[:, 0]
    # arbitrary orthonormal bases of the two spectral subspaces
    H1 = V[:, 1:1 + n_below]
    H2 = V[:, 1 + n_below:]
    if n_below > 1:
        H1 = H1 @ np.linalg.qr(rng.standard_normal((n_below, n_below)))[0]
    if dim - 1 - n_below > 1:
        H2 = H2 @ np.linalg.qr(rng.standard_normal((dim - 1 - n_below,) * 2))[0]
    w = rng.standard_normal(dim)
    f = phi + perturbation * w / np.linalg.norm(w)
    f /= np.linalg.norm(f)
    return SmallEigInstance(Q, f, lam, phi, H1, H2)


def tightness_probe(inst: SmallEigInstance, t_values, seed: int = 0):
    """Left-hand sides of both bounds along f_t = (φ + t w)/‖·‖ with w ⟂ φ fixed.

    Returns ``(dist_to_phi, lhs1, lhs2)`` arrays.
    """
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(inst.dim)
    w -= (w @ inst.phi) * inst.phi
    w /= np.linalg.norm(w)
    d, l1, l2 = [], [], []
    for t in t_values:
        f = inst.phi + t * w
        f /= np.linalg.norm(f)
        rep = verify_small_eig(SmallEigInstance(inst.Q, f, inst.lam, inst.phi, inst.H1, inst.H2))
        d.append(np.linalg.norm(f - inst.phi))
        l1.append(rep.dist)
        l2.append(rep.lam_gap)
    return np.array(d), np.array(l1), np.array(l2)


@dataclass(frozen=True)
class FemLemmaCheck:
    report: SmallEigReport
    lam_n: float
    lam_n_eps: float
    U_norm: float
    delta_identity: float  # δ computed from the form vs λ_n‖U‖/‖φ - U‖
    gamma0: float

    @property
    def delta_bound_holds(self) -> bool:
        """δ ≤ 2λ_n‖U‖ (valid when ‖φ_n - U‖ ≥ 1/2)."""
        return self.report.delta <= 2 * self.lam_n * self.U_norm * (1 + 1e-10)

    @property
    def main_bound(self) -> float:
        """(8 λ_n² ‖U‖² / γ0) (|λ_n^ε - λ_n| / γ0 + 1)."""
        lam = abs(self.lam_n_eps - self.lam_n)
        return 8 * self.lam_n**2 * self.U_norm**2 / self.gamma0 * (lam / self.gamma0 + 1)


def fem_lemma_check(A_eps: np.ndarray, M_eps: np.ndarray, phi_n: np.ndarray, lam_n: float, n: int,
                    gamma0: float) -> FemLemmaCheck:
    """Instantiate the lemma from a perforated FEM problem.

    ``phi_n`` is the unperforated discrete eigenvector restricted to the
    perforated dofs.  The load b = A_ε φ_n - λ_n M_ε φ_n is the discrete normal
    derivative, U = A_ε⁻¹ b, and q = A_ε - λ_n M_ε with f = (φ_n - U)/‖·‖_M.
    """
    A = np.asarray(A_eps, dtype=float)
    M = np.asarray(M_eps, dtype=float)
    b = A @ phi_n - lam_n * (M @ phi_n)
    U = scipy.linalg.solve(A, b, assume_a="pos")
    Q = A - lam_n * M
    w, X = scipy.linalg.eigh(A, M)
    phi = X[:, n]
    v = phi_n - U
    v_norm = math.sqrt(float(v @ M @ v))
    f = v / v_norm
    if float(phi @ M @ f) < 0:
        phi = -phi
    inst = from_gram(Q, M, f, w[n] - lam_n, phi, X[:, :n], X[:, n + 1:])
    rep = verify_small_eig(inst)
    U_norm = math.sqrt(float(U @ M @ U))
    ident = abs(rep.delta - lam_n * U_norm / v_norm) / rep.delta if rep.delta else 0.0
    return FemLemmaCheck(rep, lam_n, float(w[n]), U_norm, ident, gamma0)


def fem_lemma_from_mesh(filled, n: int) -> FemLemmaCheck:
    """P1 version of :func:`fem_lemma_check` on a mesh built with ``fill_hole=True``.

    The unperforated eigenpair (λ_n, φ_n) comes from the whole filled mesh; the
    perforated problem lives on region 0, whose vertices keep their relative order.
    """
    from .assembly import assemble_all

    _, K, M = assemble_all(filled, 1)
    w, X = scipy.linalg.eigh((K + M).toarray(), M.toarray(), subset_by_index=[0, n + 1])
    gamma0 = 0.5 * min(w[n] - w[n - 1] if n > 0 else math.inf, w[n + 1] - w[n])
    keep = np.unique(filled.triangles[filled.regions == 0])
    _, Ke, Me = assemble_all(filled.submesh(0), 1)
    return fem_lemma_check((Ke + Me).toarray(), Me.toarray(), X[keep, n], float(w[n]), n, gamma0)
