"""ε-sweeps: eigenvalue shifts on nested mesh families with Richardson extrapolation."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..analytic import BoxCosine, box_spectrum
from ..assembly import assemble_all
from ..eigensolve import check_simple, richardson, solve_lowest
from ..errors import SimplicityError
from ..geometry import Rectangle, generate_mesh, refine_uniform
from .config import ExperimentConfig

THREADS_ENV = "NEUMANN_HOLES_THREADS"


@dataclass(frozen=True)
class LevelResult:
    h: float
    dofs: int
    lam: float


@dataclass(frozen=True)
class SweepRow:
    eps: float
    lambda_eps: float
    delta_lambda: float
    error_bar: float
    levels: tuple = ()
    observed_order: float = float("nan")


@dataclass(frozen=True)
class SweepTable:
    rows: tuple
    lam_ref: float
    lam_ref_error: float
    reference: str  # "analytic" or "fem"

    @property
    def eps(self) -> np.ndarray:
        return np.array([r.eps for r in self.rows])

    @property
    def delta(self) -> np.ndarray:
        return np.array([r.delta_lambda for r in self.rows])

    @property
    def error_bars(self) -> np.ndarray:
        return np.array([r.error_bar for r in self.rows])


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def analytic_eigenfunction(config: ExperimentConfig) -> Optional[BoxCosine]:
    """Closed-form target mode for rectangles anchored at the origin, else None."""
    o = config.outer
    if not isinstance(o, Rectangle) or o.x_min != 0 or o.y_min != 0:
        return None
    sides = (o.x_max, o.y_max)
    mode = box_spectrum(sides, config.n + 1)[config.n]
    return BoxCosine(sides, mode.n, mode.simple)


def _analytic_reference(config: ExperimentConfig) -> Optional[float]:
    o = config.outer
    if not isinstance(o, Rectangle):
        return None
    modes = box_spectrum((o.x_max - o.x_min, o.y_max - o.y_min), config.n + 1)
    if not modes[config.n].simple:
        raise SimplicityError(f"closed-form eigenvalue {config.n} is multiple")
    return modes[config.n].lam


def mesh_family(config: ExperimentConfig, eps: Optional[float]):
    """Nested meshes: one generated mesh and ``levels - 1`` uniform refinements."""
    mesh = generate_mesh(config.domain(eps), config.h0, seed=config.seed)
    family = [mesh]
    for _ in range(config.levels - 1):
        family.append(refine_uniform(family[-1]))
    return family


def extrapolated_eigenvalue(config: ExperimentConfig, eps: Optional[float]):
    """λ_n on each mesh level plus its extrapolated value, error bar and observed order."""
    levels: List[LevelResult] = []
    for k, mesh in enumerate(mesh_family(config, eps)):
        _, K, M = assemble_all(mesh, config.order)
        spec = solve_lowest(K, M, config.n + 3, config.tol)
        if k == 0 and not check_simple(spec, config.n, config.rel_gap_min):
            raise SimplicityError(f"eigenvalue {config.n} is not simple at eps={eps}")
        levels.append(LevelResult(mesh.h_target, K.shape[0], spec.eigenvalues[config.n]))
    ext, err, observed = richardson([lv.lam for lv in levels], config.extrapolation_order)
    return ext, err, observed, tuple(levels)


def run_sweep(config: ExperimentConfig, eps_values: Optional[Sequence[float]] = None) -> SweepTable:
    """Extrapolated λ_n(Ω_ε) and Δλ for every ε of the config.

    The unperturbed eigenvalue comes from the closed form for rectangles and
    from the extrapolated unperforated mesh family otherwise.
    """
    eps_values = config.eps if eps_values is None else tuple(eps_values)
    ref = _analytic_reference(config)
    if ref is not None:
        ref_err, reference = 0.0, "analytic"
    else:
        ref, ref_err, _, _ = extrapolated_eigenvalue(config, None)
        reference = "fem"
    workers = min(worker_count(), len(eps_values))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda e: extrapolated_eigenvalue(config, e), eps_values))
    else:
        results = [extrapolated_eigenvalue(config, e) for e in eps_values]
    rows = tuple(
        SweepRow(float(e), ext, ext - ref, err + ref_err, levels, observed)
        for e, (ext, err, observed, levels) in zip(eps_values, results)
    )
    return SweepTable(rows, float(ref), float(ref_err), reference)
