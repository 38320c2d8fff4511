"""Bessel functions of the first kind of integer order and zeros of J0 and J1.

Power series for small arguments, Miller backward recurrence for moderate ones
and the Hankel asymptotic expansion for large ones.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import RootBracketError

_SERIES_MAX = 8.0
_MILLER_MAX = 25.0


def _series_scaled(p: int, z: np.ndarray) -> np.ndarray:
    """J_p(z) / z^p by its power series (entire in z)."""
    q = -(z / 2) ** 2
    term = np.full_like(z, 1.0 / (2.0**p * math.factorial(p)))
    total = term.copy()
    for m in range(1, 80):
        term = term * q / (m * (m + p))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _miller(nmax: int, z: float) -> np.ndarray:
    """J_0..J_nmax at a single z > 0 by normalized backward recurrence."""
    start = int(max(nmax, z)) + 40
    start += start % 2
    vals = np.zeros(start + 2)
    vals[start] = 1e-300
    for n in range(start, 0, -1):
        vals[n - 1] = (2 * n / z) * vals[n] - vals[n + 1]
        if abs(vals[n - 1]) > 1e250:  # rescale to avoid overflow
            vals[n - 1:] *= 1e-250
    norm = vals[0] + 2 * np.sum(vals[2:start + 1:2])
    return vals[: nmax + 1] / norm


def _hankel01(z: np.ndarray):
    """J0 and J1 for large z from the Hankel expansion."""
    out = []
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        P = np.ones_like(z)
        Q = np.zeros_like(z)
        term = np.ones_like(z)
        k = 1
        # terms a_k(nu) / z^k alternate between Q (odd k) and P (even k)
        while k < 40:
            term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
            if k % 4 == 1:
                Q = Q + term
            elif k % 4 == 2:
                P = P - term
            elif k % 4 == 3:
                Q = Q - term
            else:
                P = P + term
            if np.all(np.abs(term) < 1e-17):
                break
            k += 1
        chi = z - (nu / 2 + 0.25) * math.pi
        out.append(np.sqrt(2 / (math.pi * z)) * (P * np.cos(chi) - Q * np.sin(chi)))
    return out


def jn_all(nmax: int, z) -> np.ndarray:
    """Array of shape (nmax+1, *z.shape) with J_0(z)..J_nmax(z)."""
    z = np.asarray(z, dtype=float)
    flat = np.abs(z).ravel()
    out = np.zeros((nmax + 1, flat.size))
    small = flat <= _SERIES_MAX
    if small.any():
        zs = flat[small]
        for p in range(nmax + 1):
            out[p, small] = _series_scaled(p, zs) * zs**p
    mid = np.nonzero((flat > _SERIES_MAX) & (flat <= _MILLER_MAX))[0]
    for i in mid:
        out[:, i] = _miller(nmax, flat[i])
    big = flat > _MILLER_MAX
    if big.any():
        zb = flat[big]
        j0, j1 = _hankel01(zb)
        out[0, big] = j0
        if nmax >= 1:
            out[1, big] = j1
        for n in range(1, nmax):
            # forward recurrence is stable while n < z
            out[n + 1, big] = (2 * n / zb) * out[n, big] - out[n - 1, big]
    sign = np.where(z.ravel() < 0, -1.0, 1.0)
    for p in range(1, nmax + 1, 2):
        out[p] *= sign
    return out.reshape((nmax + 1,) + z.shape)


def jn(n: int, z):
    """J_n(z) for integer n >= 0."""
    if n < 0:
        return (-1) ** n * jn(-n, z)
    res = jn_all(n, z)[n]
    return float(res) if np.ndim(res) == 0 else res


def j0(z):
    return jn(0, z)


def j1(z):
    return jn(1, z)


def jn_scaled(p: int, z):
    """J_p(z) / z^p, continuous at z = 0 with value 1 / (2^p p!)."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape)
    small = np.abs(z) <= _SERIES_MAX
    if np.any(small):
        out[small] = _series_scaled(p, z[small])
    if np.any(~small):
        zb = z[~small]
        out[~small] = jn_all(p, zb)[p] / zb**p
    return float(out) if out.ndim == 0 else out


def _newton_root(f, df, x0: float, lo: float, hi: float) -> float:
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise RootBracketError(f"no sign change in [{lo}, {hi}]")
    x = x0
    for _ in range(60):
        step = f(x) / df(x)
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if f(x_new) * flo > 0:
            lo, flo = x_new, f(x_new)
        else:
            hi = x_new
        if abs(x_new - x) <= 1e-15 * abs(x_new):
            return x_new
        x = x_new
    if hi - lo <= 1e-12 * abs(x):
        return x
    raise RootBracketError("Newton iteration did not converge")


@lru_cache(maxsize=None)
def j1_zero(k: int) -> float:
    """k-th positive zero of J1 (equivalently of J0')."""
    if k < 1:
        raise ValueError("k must be >= 1")
    beta = (k + 0.25) * math.pi
    guess = beta - 3 / (8 * beta) + 3 / (128 * beta**3) * 7 / 3
    return _newton_root(j1, lambda x: j0(x) - j1(x) / x, guess, guess - 0.4, guess + 0.4)


@lru_cache(maxsize=None)
def j0_zero(k: int) -> float:
    """k-th positive zero of J0."""
    if k < 1:
        raise ValueError("k must be >= 1")
    beta = (k - 0.25) * math.pi
    guess = beta + 1 / (8 * beta)
    return _newton_root(j0, lambda x: -j1(x), guess, guess - 0.4, guess + 0.4)
