"""Lowest eigenpairs of (K+M)u = λMu by shift-invert Lanczos."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import AmbiguousSign, ConvergenceError
from .linalg import SparseCholesky

DEFAULT_SEED = 0x5EED
DEFAULT_SHIFT = 0.9
DENSE_LIMIT = 3000


@dataclass(frozen=True)
class EigenPair:
    lam: float
    vector: np.ndarray
    residual: float

    @property
    def mu(self) -> float:
        """Eigenvalue of the Neumann Laplacian itself."""
        return self.lam - 1.0

    def negated(self) -> "EigenPair":
        return EigenPair(self.lam, -self.vector, self.residual)


@dataclass(frozen=True)
class SpectrumSlice:
    pairs: tuple

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, i) -> EigenPair:
        return self.pairs[i]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs])

    @property
    def gaps(self) -> np.ndarray:
        """Distance from each eigenvalue to its nearest computed neighbour."""
        lam = self.eigenvalues
        d = np.diff(lam)
        left = np.concatenate([[np.inf], d])
        right = np.concatenate([d, [np.inf]])
        return np.minimum(left, right)


def _residuals(A, M, lam, X):
    R = A @ X - (M @ X) * lam
    return np.linalg.norm(R, axis=0) / np.linalg.norm(M @ X, axis=0)


def _finish(A, M, lam, X) -> SpectrumSlice:
    order = np.argsort(lam, kind="stable")
    lam, X = lam[order], X[:, order]
    norms = np.sqrt(np.einsum("ij,ij->j", X, M @ X))
    X = X / norms
    # fix the arbitrary sign: largest-magnitude entry positive
    idx = np.argmax(np.abs(X), axis=0)
    X = X * np.sign(X[idx, np.arange(X.shape[1])])
    rq = np.einsum("ij,ij->j", X, A @ X)
    res = _residuals(A, M, rq, X)
    pairs = []
    for k in range(len(rq)):
        v = X[:, k].copy()
        v.setflags(write=False)
        pairs.append(EigenPair(float(rq[k]), v, float(res[k])))
    return SpectrumSlice(tuple(pairs))


def _dense(A, M, m) -> SpectrumSlice:
    Ad = A.toarray() if sp.issparse(A) else np.asarray(A)
    Md = M.toarray() if sp.issparse(M) else np.asarray(M)
    lam, X = scipy.linalg.eigh(Ad, Md, subset_by_index=[0, m - 1])
    return _finish(sp.csr_matrix(Ad), sp.csr_matrix(Md), lam, X)


def _lanczos(A, M, m, tol, sigma, seed, max_dim) -> SpectrumSlice:
    n = A.shape[0]
    factor = SparseCholesky(A - sigma * M)
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n)
    q /= np.sqrt(q @ (M @ q))
    max_dim = min(n, max_dim)
    Q = np.zeros((n, max_dim + 1))
    MQ = np.zeros((n, max_dim + 1))
    alpha = np.zeros(max_dim)
    beta = np.zeros(max_dim)
    Q[:, 0] = q
    MQ[:, 0] = M @ q
    check_every = max(2, m // 2)
    for j in range(max_dim):
        w = factor.solve(MQ[:, j])
        alpha[j] = MQ[:, j] @ w
        # full reorthogonalization in the M inner product, twice
        for _ in range(2):
            w -= Q[:, : j + 1] @ (MQ[:, : j + 1].T @ w)
        Mw = M @ w
        b = np.sqrt(max(w @ Mw, 0.0))
        beta[j] = b
        k = j + 1
        breakdown = b <= 1e-14 * max(abs(alpha[j]), 1e-300)
        if k >= m and (k % check_every == 0 or breakdown or k == max_dim):
            theta, S = scipy.linalg.eigh_tridiagonal(alpha[:k], beta[: k - 1])
            top = np.argsort(theta)[::-1][:m]
            est = np.abs(b * S[-1, top]) / np.abs(theta[top])
            if np.all(est <= 1e-3 * tol) or breakdown or k == max_dim:
                lam = sigma + 1.0 / theta[top]
                X = Q[:, :k] @ S[:, top]
                res = _residuals(A, M, np.einsum("ij,ij->j", X, A @ X) / np.einsum("ij,ij->j", X, M @ X), X)
                if np.all(res <= tol):
                    return _finish(A, M, lam, X)
                if breakdown or k == max_dim:
                    raise ConvergenceError(
                        f"Lanczos stopped at dimension {k} with residuals {res.max():.3e} > {tol:.1e}"
                    )
        if breakdown:
            break
        Q[:, j + 1] = w / b
        MQ[:, j + 1] = Mw / b
    raise ConvergenceError("Lanczos iteration cap reached")


def solve_lowest(K: sp.spmatrix, M: sp.spmatrix, m: int, tol: float = 1e-9, *,
                 method: str = "lanczos", sigma: float = DEFAULT_SHIFT,
                 seed: int = DEFAULT_SEED, max_dim: Optional[int] = None) -> SpectrumSlice:
    """Lowest ``m`` eigenpairs of (K+M)u = λMu with M-orthonormal vectors.

    ``method`` is "lanczos" (shift-invert at ``sigma``), "dense" (LAPACK, small
    problems only) or "auto" (dense below a few hundred unknowns).
    """
    A = sp.csr_matrix(K + M)
    M = sp.csr_matrix(M)
    n = A.shape[0]
    if m < 1 or 4 * m > n:
        raise ValueError(f"need 1 <= m <= dim/4 (m={m}, dim={n})")
    if method == "auto":
        method = "dense" if n <= 400 else "lanczos"
    if method == "dense":
        if n > DENSE_LIMIT:
            raise ValueError(f"dense path limited to dim <= {DENSE_LIMIT}")
        return _dense(A, M, m)
    if method != "lanczos":
        raise ValueError(f"unknown method {method!r}")
    if max_dim is None:
        max_dim = max(40, 12 * m + 40)
    return _lanczos(A, M, m, tol, sigma, seed, max_dim)


def align_sign(pair: EigenPair, u_ref: np.ndarray, M: sp.spmatrix) -> EigenPair:
    """Flip ``pair`` so that its M-inner product with ``u_ref`` is nonnegative."""
    u = pair.vector
    if u.shape != np.shape(u_ref):
        raise ValueError("dimension mismatch")
    ip = float(u @ (M @ u_ref))
    scale = np.sqrt(float(u @ (M @ u)) * float(u_ref @ (M @ u_ref)))
    if abs(ip) <= 1e-10 * scale:
        raise AmbiguousSign(f"|(u, u_ref)_M| = {abs(ip):.3e} is too small to fix the sign")
    return pair if ip >= 0 else pair.negated()


def check_simple(spectrum: SpectrumSlice, n: int, rel_gap_min: float = 1e-3) -> bool:
    """Whether λ_n is separated from both neighbours by ``rel_gap_min * λ_n``."""
    if not (1 <= n < len(spectrum) - 1):
        raise ValueError(f"check_simple needs 1 <= n < m-1 (n={n}, m={len(spectrum)})")
    lam = spectrum.eigenvalues
    gap = min(lam[n] - lam[n - 1], lam[n + 1] - lam[n])
    return bool(gap >= rel_gap_min * lam[n])


def richardson(values: Sequence[float], order: float, ratio: float = 2.0):
    """Richardson extrapolation of a sequence on meshes refined by ``ratio``.

    Returns ``(extrapolated, error_bar, observed_order)``; the error bar is the
    change between the last two extrapolants (or the last correction when only
    two levels exist).
    """
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        raise ValueError("need at least two levels")
    f = ratio**order
    ext = v[1:] + (v[1:] - v[:-1]) / (f - 1)
    if len(v) >= 3:
        err = abs(ext[-1] - ext[-2])
        d1, d2 = v[-2] - v[-3], v[-1] - v[-2]
        observed = float(np.log(abs(d1 / d2)) / np.log(ratio)) if d2 != 0 and d1 != 0 else float("nan")
    else:
        err = abs(ext[-1] - v[-1])
        observed = float("nan")
    return float(ext[-1]), float(err), observed
