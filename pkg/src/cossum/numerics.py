"""Dense linear-algebra kernels shared by the solvers (LAPACK via scipy)."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg


class SvdResult(NamedTuple):
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray  # right singular vectors as columns


def _as_finite_matrix(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def svd(A, full_matrices: bool = True) -> SvdResult:
    """SVD ``A = U diag(sigma) V^T`` with descending singular values."""
    A = _as_finite_matrix(A)
    U, s, Vh = scipy.linalg.svd(A, full_matrices=full_matrices,
                                lapack_driver="gesdd")
    return SvdResult(U, s, Vh.T)


def least_squares(A, b) -> np.ndarray:
    """Minimum-norm least-squares solution of ``A x = b``."""
    A = _as_finite_matrix(A)
    b = np.asarray(b)
    if A.shape[0] != b.shape[0]:
        raise ValueError(
            f"dimension mismatch: A has {A.shape[0]} rows, b has {b.shape[0]}")
    x, *_ = scipy.linalg.lstsq(A, b, lapack_driver="gelsd")
    return x


def eig_dense(A) -> np.ndarray:
    """All eigenvalues of a square matrix, with multiplicity."""
    A = _as_finite_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("eig_dense needs a square matrix")
    return scipy.linalg.eigvals(A)


def eig_pencil(A, B, *, node_scale: float = 1.0, inf_rel: float = 1e-12,
               inf_abs: float = 1e12) -> np.ndarray:
    """Finite generalized eigenvalues ``lambda`` of ``A v = lambda B v``.

    An eigenvalue pair ``(alpha, beta)`` counts as infinite when
    ``|beta| <= inf_rel (|alpha| + |beta|)`` or when ``|alpha/beta|`` exceeds
    ``inf_abs * node_scale``.
    """
    A = _as_finite_matrix(A)
    B = _as_finite_matrix(B)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError("eig_pencil needs two square matrices of equal size")
    ab = scipy.linalg.eigvals(A, B, homogeneous_eigvals=True)
    alpha, beta = ab[0], ab[1]
    finite = np.abs(beta) > inf_rel * (np.abs(alpha) + np.abs(beta))
    lam = np.full(alpha.shape, np.inf, dtype=complex)
    lam[finite] = alpha[finite] / beta[finite]
    finite &= np.abs(lam) <= inf_abs * node_scale
    return lam[finite]


def numerical_rank(sigma, eps: float) -> int:
    """Smallest ``M`` with ``sigma[M] < eps * sigma[0]``, else ``len(sigma)``."""
    sigma = np.asarray(sigma, dtype=float)
    if len(sigma) == 0 or sigma[0] == 0:
        return 0
    small = np.nonzero(sigma < eps * sigma[0])[0]
    return int(small[0]) if len(small) else len(sigma)


def pencil_eigenvalues(A, B) -> np.ndarray:
    """Eigenvalues of ``pinv(A) @ B`` for a (possibly rectangular) pencil ``zA - B``."""
    return eig_dense(least_squares(A, B))
