"""DCT-II of sample vectors and the rational data derived from it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft



@dataclass(frozen=True)
class DctVector:
    values: np.ndarray

    @property
    def N(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class TransformedData:
    """Values ``g_k`` at support nodes ``z_k = cos(pi k / N)``.

    ``N`` is the length of the underlying transform; ``count`` may be smaller
    when only the leading half of the spectrum is retained.
    """

    g: np.ndarray
    z: np.ndarray
    N: int

    @property
    def count(self) -> int:
        return len(self.g)


def dct2(samples) -> DctVector:
    """Unnormalized DCT-II, ``sum_l f_l cos(pi k (2l+1) / 2N)``, in O(N log N)."""
    x = np.asarray(getattr(samples, "values", samples), dtype=float)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("dct2 expects a non-empty 1-D vector")
    # scipy's unnormalized type-II transform carries an extra factor 2
    return DctVector(scipy.fft.dct(x, type=2) / 2)


def dct2_direct(x) -> np.ndarray:
    """Reference O(N^2) evaluation of the cosine-matrix product."""
    x = np.asarray(x, dtype=float)
    N = len(x)
    k = np.arange(N)
    return np.cos(np.pi * np.outer(k, 2 * k + 1) / (2 * N)) @ x


def idct2(dct: DctVector) -> np.ndarray:
    """Inverse of :func:`dct2`.

    The scaled cosine matrix ``sqrt(2/N) diag(1/sqrt2, 1, ..., 1) C`` is
    orthogonal, so ``C^{-1} = (2/N) C^T diag(1/2, 1, ..., 1)``.
    """
    c = np.asarray(getattr(dct, "values", dct), dtype=float)
    # unnormalized type-III is c_0 + 2 sum_{k>=1} c_k cos(...)
    return scipy.fft.dct(c, type=3) / len(c)


def g_vector(dct: DctVector, half: bool = False) -> TransformedData:
    """Form ``g_k = (-1)^k fhat_k / cos(pi k / 2N)`` and ``z_k = cos(pi k / N)``.

    With ``half`` only ``k < N//2`` is kept, which avoids amplifying noise by
    the large factors ``1/cos(pi k / 2N)`` near ``k = N``.
    """
    fhat = np.asarray(getattr(dct, "values", dct), dtype=float)
    N = len(fhat)
    if N < 2:
        raise ValueError("need at least two transform values")
    count = N // 2 if half else N
    k = np.arange(count)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    g = sign * fhat[:count] / np.cos(np.pi * k / (2 * N))
    return TransformedData(g=g, z=support_nodes(N)[:count], N=N)


def support_nodes(N: int) -> np.ndarray:
    return np.cos(np.pi * np.arange(N) / N)


def fhat_from_g(g: np.ndarray, N: int) -> np.ndarray:
    """Undo the scaling of :func:`g_vector` for the leading ``len(g)`` entries."""
    k = np.arange(len(g))
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return sign * np.cos(np.pi * k / (2 * N)) * g
