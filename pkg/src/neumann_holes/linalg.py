"""Sparse symmetric positive definite factorization."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import FactorizationError


class SparseCholesky:
    """LDLᵀ-equivalent factorization of a sparse SPD matrix.

    SuperLU is run in symmetric mode with diagonal pivoting only and a
    minimum-degree ordering of A + Aᵀ, so the factor is a symmetric permutation
    of a Cholesky factor.  Positive definiteness is certified by the pivots.
    """

    def __init__(self, A: sp.spmatrix):
        A = sp.csc_matrix(A)
        if A.shape[0] != A.shape[1]:
            raise FactorizationError("matrix is not square")
        try:
            self._lu = splu(
                A,
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:  # exactly singular
            raise FactorizationError(str(exc)) from exc
        lu = self._lu
        if not np.array_equal(lu.perm_r, lu.perm_c):
            raise FactorizationError("factorization needed off-diagonal pivoting; matrix is not SPD")
        pivots = lu.U.diagonal()
        if not np.all(pivots > 0):
            raise FactorizationError("non-positive pivot; matrix is not positive definite")
        self.shape = A.shape
        self.min_pivot = float(pivots.min())

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self._lu.solve(np.asarray(b, dtype=float))

    def logdet(self) -> float:
        return float(np.sum(np.log(self._lu.U.diagonal())))
