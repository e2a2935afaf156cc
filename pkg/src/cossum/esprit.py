"""ESPRIT for cosine sums via a Toeplitz+Hankel matrix pencil."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import CosineSum, SampleVector
from .numerics import eig_dense, least_squares, numerical_rank, svd

logger = logging.getLogger(__name__)

IMAG_REL_TOL = 1e-6
DOMAIN_TOL = 1e-8
MERGE_REL_TOL = 1e-8
# cosines this close to +-1 are indistinguishable from the endpoint in binary64
ENDPOINT_SNAP = 16 * np.finfo(float).eps


class RecoveryError(RuntimeError):
    """A solver could not produce a valid cosine sum."""


@dataclass
class EspritConfig:
    """Settings for :func:`esprit_recover`.

    Args:
        L: upper bound for the number of terms, at most ``N // 2``;
            ``None`` selects ``N // 2``.
        eps: relative singular-value threshold for rank detection.
        fixed_M: skip rank detection and use this many terms (noisy data).
    """

    L: Optional[int] = None
    eps: float = 1e-10
    fixed_M: Optional[int] = None


@dataclass
class EspritResult:
    sum: CosineSum
    singular_values: np.ndarray
    eigenvalues: np.ndarray
    diagnostics: list = field(default_factory=list)


def build_toeplitz_hankel(samples: SampleVector, L: int) -> np.ndarray:
    """``(f_{l+m-1} + f_{m-l-1}) / 2`` for ``m = 0..N-L+1`` and ``l = 0..L-1``."""
    N = samples.grid.N
    if not 1 <= L <= N // 2:
        raise ValueError(f"L must lie in [1, {N // 2}], got {L}")
    m = np.arange(N - L + 2)[:, None]
    l = np.arange(L)[None, :]
    return 0.5 * (samples.at(l + m - 1) + samples.at(m - l - 1))


def cosines_to_frequencies(c, h: float, *, strict: bool, diagnostics: list,
                           imag_rel_tol: float = IMAG_REL_TOL,
                           domain_tol: float = DOMAIN_TOL) -> np.ndarray:
    """Map candidate values of ``cos(phi h)`` to frequencies.

    Nearly real values inside ``[-1, 1]`` (up to ``domain_tol``) are kept and
    clamped. Anything else raises :class:`RecoveryError` when ``strict`` and
    is dropped with a diagnostic otherwise.
    """
    c = np.asarray(c, dtype=complex)
    bad_imag = np.abs(c.imag) > imag_rel_tol * (1 + np.abs(c.real))
    bad_dom = np.abs(c.real) > 1 + domain_tol
    bad = bad_imag | bad_dom
    if np.any(bad):
        msg = (f"{int(bad.sum())} eigenvalue(s) not in [-1, 1]: "
               f"{np.array2string(c[bad], precision=6)}")
        if strict:
            raise RecoveryError(msg)
        logger.warning(msg)
        diagnostics.append("dropped " + msg)
    c = np.clip(c.real[~bad], -1.0, 1.0)
    near_end = np.abs(c) >= 1 - ENDPOINT_SNAP
    c[near_end] = np.sign(c[near_end])
    return np.arccos(c) / h


def merge_duplicates(phi: np.ndarray, K: float, diagnostics: list) -> np.ndarray:
    phi = np.sort(phi)
    if len(phi) < 2:
        return phi
    keep = np.concatenate([[True], np.diff(phi) >= MERGE_REL_TOL * K])
    if not np.all(keep):
        diagnostics.append(f"merged {int((~keep).sum())} duplicate frequencies")
    return phi[keep]


def vandermonde_gamma(samples: SampleVector, phi) -> np.ndarray:
    """Least-squares coefficients for fixed frequencies on the sampling grid."""
    V = np.cos(np.outer(samples.grid.nodes, phi))
    return least_squares(V, samples.values)


def esprit_recover(samples: SampleVector, config: Optional[EspritConfig] = None,
                   *, full_output: bool = False):
    """Recover a cosine sum from equidistant samples with ESPRIT.

    The three row-shifted slices of the leading left singular vectors of the
    Toeplitz+Hankel matrix form a pencil whose eigenvalues are
    ``2 cos(phi_j h)``. Coefficients come from a Vandermonde least-squares
    fit on all samples.

    Returns:
        The recovered :class:`CosineSum` with frequencies ascending, or an
        :class:`EspritResult` when ``full_output`` is set.
    """
    config = config or EspritConfig()
    grid = samples.grid
    N = grid.N
    L = config.L if config.L is not None else N // 2
    H = build_toeplitz_hankel(samples, L)
    # only the leading columns of U are needed
    U, sigma, _ = svd(H, full_matrices=False)
    if config.fixed_M is not None:
        M = int(config.fixed_M)
        if not 1 <= M <= L:
            raise ValueError(f"fixed_M must lie in [1, L={L}]")
    else:
        M = numerical_rank(sigma, config.eps)
    if M == 0:
        raise RecoveryError("Toeplitz+Hankel matrix has numerical rank 0")

    U_minus = U[0:N - L, :M]
    U_zero = U[1:N - L + 1, :M]
    U_plus = U[2:N - L + 2, :M]
    z = eig_dense(least_squares(U_zero, U_minus + U_plus))

    diagnostics: list = []
    strict = config.fixed_M is None
    phi = cosines_to_frequencies(z / 2, grid.h, strict=strict, diagnostics=diagnostics)
    phi = merge_duplicates(phi, grid.K, diagnostics)
    if len(phi) == 0:
        raise RecoveryError("no admissible frequencies")
    gamma = vandermonde_gamma(samples, phi)
    result = CosineSum(gamma, phi)
    if full_output:
        return EspritResult(result, sigma, z, diagnostics)
    return result
