"""Sign of the eigenvalue shift predicted from the interface indicator h."""
from __future__ import annotations

from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from .. import analytic
from ..analytic import AnalyticEigenfunction, gamma_indicator

MARGIN_FRACTION = 1e-3


class Region(str, Enum):
    OMEGA_PLUS = "OmegaPlus"  # a small hole raises λ
    OMEGA_MINUS = "OmegaMinus"  # a small hole lowers λ
    INDETERMINATE = "IndeterminateNearGamma"


def indicator_scale(phi: AnalyticEigenfunction, N: Optional[int] = None, samples: Optional[int] = None) -> float:
    """max |h| over a grid of the domain's bounding box, restricted to the domain."""
    if samples is None:
        samples = 201 if phi.dim == 2 else 41
    N = phi.dim if N is None else N
    # the prefactor is part of the key so a patched indicator is never served stale
    return _indicator_scale(phi, N, samples, analytic.gamma_prefactor(N))


@lru_cache(maxsize=64)
def _indicator_scale(phi: AnalyticEigenfunction, N: int, samples: int, _prefactor: float) -> float:
    box = phi.bbox
    axes = [np.linspace(box[2 * i], box[2 * i + 1], samples) for i in range(phi.dim)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, phi.dim)
    pts = pts[phi.contains(pts)]
    return float(np.max(np.abs(gamma_indicator(phi, pts, N))))


def _nodal(phi: AnalyticEigenfunction, x0: np.ndarray, tol: float = 1e-9) -> bool:
    table = phi.derivative_table(x0, 2)
    scale = max(abs(v) for v in table.values())
    return abs(table[(0,) * phi.dim]) <= tol * scale


def classify_sign(x0, phi: AnalyticEigenfunction, N: Optional[int] = None,
                  margin: Optional[float] = None) -> Region:
    """Region of x0 for a ball-shaped hole.

    ``margin`` is an absolute threshold on |h(x0)|; by default it is
    ``MARGIN_FRACTION`` times max |h| over the domain.  Nodal points are always
    in Ω⁻, including singular ones where h vanishes.
    """
    x0 = np.asarray(x0, dtype=float)
    if _nodal(phi, x0):
        return Region.OMEGA_MINUS
    if margin is None:
        margin = MARGIN_FRACTION * indicator_scale(phi, N)
    h = float(gamma_indicator(phi, x0.reshape(1, -1), N)[0])
    if abs(h) < margin:
        return Region.INDETERMINATE
    return Region.OMEGA_MINUS if h > 0 else Region.OMEGA_PLUS
