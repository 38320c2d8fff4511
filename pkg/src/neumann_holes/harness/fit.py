"""Leading-order fits Δλ ≈ C ε^p (optionally times |log ε|)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import Unfittable

NOISE_FACTOR = 100.0
MIN_POINTS = 4


@dataclass(frozen=True)
class FitResult:
    """``exponent`` is the least-squares slope; ``coefficient`` uses the exponent
    snapped to the nearest integer, ``coefficient_raw`` the fitted one."""

    exponent: float
    coefficient: float
    coefficient_raw: float
    r_squared: float
    residuals: tuple
    used_eps: tuple
    discarded_eps: tuple
    model: str


def _profile(eps: np.ndarray, model: str) -> np.ndarray:
    return np.abs(np.log(eps)) if model == "power_log" else np.ones_like(eps)


def fit_leading_order(eps: Sequence[float], delta: Sequence[float], error_bars: Sequence[float] = None,
                      model: str = "power") -> FitResult:
    """Least-squares slope of log|Δλ| (or log(|Δλ|/|log ε|)) against log ε.

    Points with |Δλ| below ``NOISE_FACTOR`` times their error bar are dropped;
    fewer than ``MIN_POINTS`` survivors raise :class:`Unfittable`.  The
    coefficient is Δλ/(ε^p·profile) at the smallest retained ε.
    """
    if model not in ("power", "power_log"):
        raise ValueError(f"unknown model {model!r}")
    eps = np.asarray(eps, dtype=float)
    delta = np.asarray(delta, dtype=float)
    err = np.zeros_like(eps) if error_bars is None else np.asarray(error_bars, dtype=float)
    if not (eps.shape == delta.shape == err.shape):
        raise ValueError("eps, delta and error_bars must have equal length")
    usable = (np.abs(delta) >= NOISE_FACTOR * err) & (delta != 0) & (eps > 0)
    if model == "power_log":
        usable &= eps != 1.0
    if usable.sum() < MIN_POINTS:
        raise Unfittable(f"only {int(usable.sum())} points above the noise floor (need {MIN_POINTS})")
    e, d = eps[usable], delta[usable]
    x = np.log(e)
    y = np.log(np.abs(d) / _profile(e, model))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    i = int(np.argmin(e))
    base = d[i] / _profile(e[i : i + 1], model)[0]
    snapped = float(round(slope))
    return FitResult(
        exponent=float(slope),
        coefficient=float(base / e[i] ** snapped),
        coefficient_raw=float(base / e[i] ** slope),
        r_squared=r2,
        residuals=tuple(float(r) for r in resid),
        used_eps=tuple(float(v) for v in e),
        discarded_eps=tuple(float(v) for v in eps[~usable]),
        model=model,
    )


def fit_table(table, model: str = "power") -> FitResult:
    return fit_leading_order(table.eps, table.delta, table.error_bars, model)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log|y| against log x."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.abs(np.asarray(y, float))), 1)[0])


def log_corrected_slope(eps: Sequence[float], values: Sequence[float]) -> float:
    """Slope of log(|v|/|log ε|) against log ε."""
    eps = np.asarray(eps, float)
    return loglog_slope(eps, np.abs(np.asarray(values, float)) / np.abs(np.log(eps)))

