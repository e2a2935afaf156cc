"""Bessel functions of the first kind and the modified target ``(B/t) J_n(t)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

SERIES_LIMIT = 12.0
_RESCALE = 1e250


@dataclass(frozen=True)
class BesselSpec:
    """Target ``J_n(B, t) = (B / t) J_n(t)`` on ``[0, B]``."""

    n: int
    B: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("order n must be a positive integer")
        if not self.B > 0:
            raise ValueError("B must be positive")


def _series(n: int, t: float) -> float:
    # sum_k (-1)^k (t/2)^(2k+n) / (k! (k+n)!)
    x = 0.5 * t
    term = x ** n / math.factorial(n)
    total = term
    x2 = x * x
    k = 0
    while True:
        k += 1
        term *= -x2 / (k * (k + n))
        total += term
        if abs(term) <= 1e-17 * abs(total) or k > 200:
            return total


def _miller(n: int, t: float, depth: int) -> float:
    """Backward recurrence normalized by ``J_0 + 2 sum J_2k = 1``."""
    start = depth + (depth % 2)  # even start keeps the normalization sum aligned
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    out = 0.0
    for k in range(start, 0, -1):
        j_prev = 2 * k / t * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now approximates a multiple of J_{k-1}
        if k - 1 == n:
            out = j_cur
        if (k - 1) % 2 == 0:
            norm += j_cur if k - 1 == 0 else 2 * j_cur
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            norm /= _RESCALE
            out /= _RESCALE
    return out / norm


def miller_depth(n: int, t: float) -> int:
    return n + math.ceil(1.5 * t) + 40


def bessel_j(n: int, t: float, depth: Optional[int] = None) -> float:
    """``J_n(t)`` for integer ``n >= 0`` and ``t >= 0``.

    Uses the ascending series for ``t <= 12`` and Miller's backward
    recurrence above, started at ``depth`` (default ``n + ceil(1.5 t) + 40``).
    """
    if n < 0 or int(n) != n:
        raise ValueError("order must be a nonnegative integer")
    if t < 0:
        raise ValueError("argument must be nonnegative")
    n = int(n)
    t = float(t)
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    if t <= SERIES_LIMIT and depth is None:
        return _series(n, t)
    return _miller(n, t, depth if depth is not None else miller_depth(n, t))


def _series_array(n: int, t: np.ndarray) -> np.ndarray:
    x = 0.5 * t
    term = x ** n / math.factorial(n)
    total = term.copy()
    x2 = x * x
    for k in range(1, 200):
        term = term * (-x2 / (k * (k + n)))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller_array(n: int, t: np.ndarray, depth: int) -> np.ndarray:
    start = depth + (depth % 2)
    j_next = np.zeros_like(t)
    j_cur = np.full_like(t, 1e-300)
    norm = np.zeros_like(t)
    out = np.zeros_like(t)
    for k in range(start, 0, -1):
        j_next, j_cur = j_cur, 2 * k / t * j_cur - j_next
        if k - 1 == n:
            out = j_cur.copy()
        if (k - 1) % 2 == 0:
            norm += j_cur if k - 1 == 0 else 2 * j_cur
        big = np.abs(j_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            j_cur *= scale
            j_next *= scale
            norm *= scale
            out *= scale
    return out / norm


def bessel_j_array(n: int, t) -> np.ndarray:
    """Vectorized :func:`bessel_j` with the same branch rule."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("argument must be nonnegative")
    flat = t.ravel()
    out = np.zeros_like(flat)
    out[flat == 0] = 1.0 if n == 0 else 0.0
    low = (flat > 0) & (flat <= SERIES_LIMIT)
    high = flat > SERIES_LIMIT
    if np.any(low):
        out[low] = _series_array(n, flat[low])
    if np.any(high):
        out[high] = _miller_array(n, flat[high], miller_depth(n, flat[high].max()))
    return out.reshape(t.shape)


def bessel_mod(spec: BesselSpec, t):
    """``(B / t) J_n(t)`` with its limit at ``t = 0`` (``B/2`` for ``n = 1``, else 0).

    Raises:
        ValueError: for ``t`` outside ``[0, B]``.
    """
    tv = np.asarray(t, dtype=float)
    if np.any(tv < 0) or np.any(tv > spec.B):
        raise ValueError(f"t must lie in [0, {spec.B}]")
    flat = np.atleast_1d(tv).ravel()
    out = np.full_like(flat, spec.B / 2 if spec.n == 1 else 0.0)
    pos = flat > 0
    out[pos] = spec.B / flat[pos] * bessel_j_array(spec.n, flat[pos])
    if tv.ndim == 0:
        return float(out[0])
    return out.reshape(tv.shape)
