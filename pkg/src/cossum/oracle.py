"""Direct Prony-type solver for exact data with known order.

The characteristic polynomial ``p(z) = prod_j (z - cos(phi_j h))`` is
expanded in the Chebyshev basis ``T_l``. Its coefficients solve a small
Toeplitz+Hankel system built from the samples, and its roots are the
eigenvalues of a colleague matrix. This is numerically fragile for larger
orders and serves as a brute-force reference for the stable solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CosineSum, SampleVector
from .numerics import eig_dense, least_squares

ROOT_IMAG_TOL = 1e-8
ROOT_DOMAIN_TOL = 1e-8


class PronyError(ValueError):
    pass


@dataclass(frozen=True)
class ChebyshevPoly:
    """Polynomial ``sum_l coeffs[l] * T_l(z)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.atleast_1d(np.asarray(self.coeffs, dtype=float)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return chebyshev_eval(self, z)

    @classmethod
    def from_roots(cls, roots) -> "ChebyshevPoly":
        """Expand ``prod (z - r)`` using ``T_a T_1 = (T_{a+1} + T_{|a-1|}) / 2``."""
        c = np.array([1.0])
        for r in np.asarray(roots, dtype=float):
            out = np.zeros(len(c) + 1)
            out[:-1] -= r * c
            for a, ca in enumerate(c):
                if a == 0:
                    out[1] += ca
                else:
                    out[a + 1] += ca / 2
                    out[a - 1] += ca / 2
            c = out
        return cls(c)


def chebyshev_eval(p: ChebyshevPoly, z):
    """Clenshaw recurrence for ``sum_l p_l T_l(z)``."""
    c = p.coeffs
    z = np.asarray(z, dtype=float)
    b1 = np.zeros_like(z)
    b2 = np.zeros_like(z)
    for ck in c[:0:-1]:
        b1, b2 = 2 * z * b1 - b2 + ck, b1
    out = z * b1 - b2 + c[0]
    return out[()] if out.ndim == 0 else out


def chebyshev_companion(p: ChebyshevPoly) -> np.ndarray:
    """Colleague matrix whose characteristic polynomial is ``p / (2^{M-1} p_M)``."""
    c = p.coeffs
    M = p.degree
    if M < 1:
        raise ValueError("companion matrix needs degree >= 1")
    if c[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    if M == 1:
        return np.array([[-c[0] / c[1]]])
    C = np.zeros((M, M))
    idx = np.arange(M - 1)
    C[idx, idx + 1] = 0.5
    C[idx[1:] + 1, idx[1:]] = 0.5
    C[1, 0] = 1.0
    C[:, -1] -= c[:-1] / (2 * c[-1])
    return C


def toeplitz_hankel_square(samples: SampleVector, M: int, shift: int = 0) -> np.ndarray:
    """``(f_{m+l+shift} + f_{m-l+shift})_{m,l=0}^{M-1}`` using the even extension."""
    m = np.arange(M)[:, None] + shift
    l = np.arange(M)[None, :]
    return samples.at(m + l) + samples.at(m - l)


def prony_polynomial(samples: SampleVector, M: int, square: bool = False) -> ChebyshevPoly:
    """Chebyshev coefficients of the characteristic polynomial.

    The annihilation identity ``sum_l p_l (f_{m+l} + f_{m-l}) = 0`` holds for
    every ``m`` with ``m + M < N``. ``square`` uses only ``m < M`` (the
    minimal system); by default all available rows are used in a
    least-squares sense, which is markedly better conditioned.
    """
    N = samples.grid.N
    if N < 2 * M:
        raise PronyError(f"need at least {2 * M} samples, got {N}")
    rows = M if square else N - M
    m = np.arange(rows)
    l = np.arange(M)
    A = samples.at(m[:, None] + l) + samples.at(m[:, None] - l)
    lead = 2.0 ** (1 - M)
    rhs = -lead * (samples.at(m + M) + samples.at(m - M))
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-14 * sv[0] * max(A.shape):
        raise PronyError("Toeplitz+Hankel system is singular")
    return ChebyshevPoly(np.append(least_squares(A, rhs), lead))


def prony_solve(samples: SampleVector, M: int, square: bool = False) -> CosineSum:
    """Recover an ``M``-term cosine sum from exact samples.

    Raises:
        PronyError: if the system is singular or a root leaves ``[-1, 1]``.
    """
    if M < 1:
        raise ValueError("M must be positive")
    p = prony_polynomial(samples, M, square=square)
    roots = eig_dense(chebyshev_companion(p))
    if np.any(np.abs(roots.imag) > ROOT_IMAG_TOL):
        raise PronyError("characteristic polynomial has complex roots")
    roots = roots.real
    if np.any(np.abs(roots) > 1 + ROOT_DOMAIN_TOL):
        raise PronyError("characteristic polynomial has roots outside [-1, 1]")
    h = samples.grid.h
    phi = np.arccos(np.clip(roots, -1.0, 1.0)) / h
    n = 2 * M if square else samples.grid.N
    V = np.cos(np.outer(samples.grid.nodes[:n], phi))
    gamma = least_squares(V, samples.values[:n])
    return CosineSum(gamma, phi).sorted()
